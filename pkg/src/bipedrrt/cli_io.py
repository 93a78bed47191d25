"""Scenario files, solution records, CoM sampling and json/csv/svg export."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

from . import kernels
from .core import Config, KinematicParams, to_global, vector_to_global
from .lipm import LipmParams, LocomotionParams, PendulumState, omega, state_at
from .planner import Node, Planner, PlannerConfig, PlanResult
from .world import (
    Bounds,
    CircularMotion,
    LinearMotion,
    Obstacle,
    StaticMotion,
    World,
    is_free,
    obstacle_pose_at,
    period,
)

SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "svg")
LAYERS = ("walls", "obstacles", "tree", "raw", "rewired", "footsteps", "com")
OUT_DIR_ENV = "BIPEDRRT_OUT_DIR"


class ScenarioError(ValueError):
    """Invalid scenario; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class Scenario:
    name: str
    bounds: Bounds
    q_start: Config
    q_goal: Config
    m_start: LocomotionParams
    kinematics: KinematicParams
    lipm: LipmParams
    world: World
    planner: PlannerConfig

    def make_planner(self) -> Planner:
        return Planner(
            self.q_start, self.q_goal, self.m_start, self.kinematics, self.lipm,
            self.world, self.bounds, self.planner,
        )


# ---------------------------------------------------------------- parsing

def _number(value, name: str, positive: bool = False, non_negative: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(name, f"expected a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ScenarioError(name, "must be finite")
    if positive and not v > 0.0:
        raise ScenarioError(name, f"must be positive, got {v!r}")
    if non_negative and v < 0.0:
        raise ScenarioError(name, f"must be non-negative, got {v!r}")
    return v


def _integer(value, name: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(name, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ScenarioError(name, f"must be at least {minimum}")
    return value


def _vector(value, name: str, n: int) -> Tuple[float, ...]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ScenarioError(name, f"expected a list of {n} numbers")
    return tuple(_number(v, f"{name}[{i}]") for i, v in enumerate(value))


def _require(data: dict, key: str, prefix: str = ""):
    if not isinstance(data, dict):
        raise ScenarioError(prefix.rstrip(".") or "scenario", "expected an object")
    if key not in data:
        raise ScenarioError(prefix + key, "missing")
    return data[key]


def _config(value, name: str) -> Config:
    x, y, th = _vector(value, name, 3)
    return Config(x, y, th)


def _m_start(data) -> LocomotionParams:
    pre = "m_start."
    vals = {k: _number(_require(data, k, pre), pre + k)
            for k in ("p_x", "p_y", "xd_apex", "yd_apex", "y_apex")}
    timing = {k: _number(data.get(k, 0.0), pre + k, non_negative=True) for k in ("t_switch", "t_apex")}
    if "x_apex" in data:
        x_apex = _number(data["x_apex"], pre + "x_apex")
        if abs(x_apex - vals["p_x"]) > 1e-12:
            raise ScenarioError(pre + "x_apex", "must equal p_x (the apex lies over the stance foot)")
    return LocomotionParams(vals["p_x"], vals["xd_apex"], vals["yd_apex"],
                            timing["t_switch"], timing["t_apex"], vals["p_y"], vals["y_apex"])


def _motion(data, name: str):
    kind = data.get("type", "static")
    if kind == "static":
        return StaticMotion()
    if kind == "linear":
        vel = _vector(_require(data, "velocity", name + "."), name + ".velocity", 2)
        travel = data.get("travel")
        if travel is not None:
            travel = _number(travel, name + ".travel", positive=True)
        return LinearMotion(vel, travel)
    if kind == "circular":
        return CircularMotion(
            _vector(_require(data, "center", name + "."), name + ".center", 2),
            _number(_require(data, "radius", name + "."), name + ".radius", non_negative=True),
            _number(_require(data, "rate", name + "."), name + ".rate"),
            _number(data.get("phase", 0.0), name + ".phase"),
        )
    raise ScenarioError(name + ".type", f"unknown motion type {kind!r}")


def _obstacle(data, i: int) -> Obstacle:
    name = f"obstacles[{i}]"
    if not isinstance(data, dict):
        raise ScenarioError(name, "expected an object")
    motion = _motion(data.get("motion", {}), name + ".motion")
    if isinstance(motion, CircularMotion):
        center = (0.0, 0.0)
    else:
        center = _vector(_require(data, "center", name + "."), name + ".center", 2)
    half = _vector(_require(data, "half_extents", name + "."), name + ".half_extents", 2)
    if not (half[0] > 0.0 and half[1] > 0.0):
        raise ScenarioError(name + ".half_extents", "must be positive")
    return Obstacle(center, half, _number(data.get("orientation", 0.0), name + ".orientation"),
                    motion, str(data.get("name", "")))


def _planner(data, seed_default: int = 0) -> PlannerConfig:
    pre = "planner."
    d = PlannerConfig()
    tol = data.get("goal_tolerance", list(d.goal_tolerance))
    tol = _vector(tol, pre + "goal_tolerance", 2)
    if not (tol[0] > 0.0 and tol[1] > 0.0):
        raise ScenarioError(pre + "goal_tolerance", "must be positive")
    goal_bias = _number(data.get("goal_bias", d.goal_bias), pre + "goal_bias")
    if not 0.0 < goal_bias < 1.0:
        raise ScenarioError(pre + "goal_bias", "must lie in (0, 1)")
    selection = data.get("selection", d.selection)
    if selection not in ("exclude_truncated", "prefix_duration"):
        raise ScenarioError(pre + "selection", f"unknown mode {selection!r}")
    seed = _integer(data.get("seed", seed_default), pre + "seed")
    if seed >= 2**64:
        raise ScenarioError(pre + "seed", "must fit in 64 bits")
    return PlannerConfig(
        k_nearest=_integer(data.get("k_nearest", d.k_nearest), pre + "k_nearest", 1),
        goal_bias=goal_bias,
        goal_tolerance=tol,
        max_iterations=_integer(data.get("max_iterations", d.max_iterations), pre + "max_iterations"),
        rewire_iterations=_integer(data.get("rewire_iterations", d.rewire_iterations),
                                   pre + "rewire_iterations"),
        rng_seed=seed,
        selection=selection,
    )


def parse_scenario(data: dict) -> Scenario:
    """Validate a scenario document and fill in defaults."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario", "expected an object")
    if "scenario" in data and isinstance(data["scenario"], dict):
        data = data["scenario"]  # a result file embeds its resolved scenario
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")

    b = _require(data, "bounds")
    lo = _vector(_require(b, "q_min", "bounds."), "bounds.q_min", 3)
    hi = _vector(_require(b, "q_max", "bounds."), "bounds.q_max", 3)
    bounds = Bounds(lo, hi)

    kin = _require(data, "kinematics")
    values = {k: _number(_require(kin, k, "kinematics."), k, positive=True)
              for k in ("r_min", "s_max", "V")}
    try:
        kinematics = KinematicParams(values["r_min"], values["s_max"], values["V"])
    except ValueError as exc:
        raise ScenarioError("s_max", str(exc)) from None

    lp = data.get("lipm", {})
    lipm = LipmParams(
        _number(lp.get("g", 9.81), "lipm.g", positive=True),
        _number(lp.get("a", 0.0), "lipm.a"),
        _number(lp.get("b", 1.0), "lipm.b"),
    )

    obstacles = _require(data, "obstacles")
    if not isinstance(obstacles, list):
        raise ScenarioError("obstacles", "expected a list")
    obs = tuple(_obstacle(o, i) for i, o in enumerate(obstacles))
    radius = _number(data.get("safety_radius", 0.3), "safety_radius", positive=True)
    if "world_bounds" in data:
        xlo, xhi, ylo, yhi = _vector(data["world_bounds"], "world_bounds", 4)
        wb = Bounds((xlo, ylo, 0.0), (xhi, yhi, 0.0))
    else:
        wb = Bounds((bounds.lo[0], bounds.lo[1], 0.0), (bounds.hi[0], bounds.hi[1], 0.0))
    try:
        world = World(obs, wb, radius)
    except ValueError as exc:
        raise ScenarioError("world_bounds", str(exc)) from None

    q_start = _config(_require(data, "q_start"), "q_start")
    q_goal = _config(_require(data, "q_goal"), "q_goal")
    m_start = _m_start(_require(data, "m_start"))
    if not world.bounds.contains(q_start.x, q_start.y):
        raise ScenarioError("q_start", "outside the world bounds")
    if not is_free((q_start.x, q_start.y), 0.0, world):
        raise ScenarioError("q_start", "in collision at t = 0")
    if not is_free((m_start.p_x, m_start.p_y), 0.0, world):
        raise ScenarioError("m_start", "start footstep in collision at t = 0")

    planner = _planner(data.get("planner", {}))
    return Scenario(str(data.get("name", "")), bounds, q_start, q_goal, m_start,
                    kinematics, lipm, world, planner)


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError("file", f"parse error at line {exc.lineno}: {exc.msg}") from None
    return parse_scenario(data)


def _motion_dict(m) -> dict:
    if isinstance(m, LinearMotion):
        out = {"type": "linear", "velocity": list(m.velocity)}
        if m.travel is not None:
            out["travel"] = m.travel
        return out
    if isinstance(m, CircularMotion):
        return {"type": "circular", "center": list(m.center), "radius": m.radius,
                "rate": m.rate, "phase": m.phase}
    return {"type": "static"}


def scenario_to_dict(s: Scenario) -> dict:
    """Fully resolved scenario (every default written out)."""
    obstacles = []
    for o in s.world.obstacles:
        d = {"name": o.name, "half_extents": list(o.half_extents),
             "orientation": o.orientation, "motion": _motion_dict(o.motion)}
        if not isinstance(o.motion, CircularMotion):
            d["center"] = list(o.center)
        obstacles.append(d)
    p = s.planner
    m = s.m_start
    return {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "bounds": {"q_min": list(s.bounds.lo), "q_max": list(s.bounds.hi)},
        "world_bounds": list(s.world.bounds.xy),
        "q_start": list(s.q_start),
        "q_goal": list(s.q_goal),
        "m_start": m.as_dict(),
        "kinematics": {"r_min": s.kinematics.r_min, "s_max": s.kinematics.s_max,
                       "V": s.kinematics.V},
        "lipm": {"g": s.lipm.g, "a": s.lipm.a, "b": s.lipm.b},
        "safety_radius": s.world.safety_radius,
        "obstacles": obstacles,
        "planner": {
            "k_nearest": p.k_nearest, "goal_bias": p.goal_bias,
            "goal_tolerance": list(p.goal_tolerance), "max_iterations": p.max_iterations,
            "rewire_iterations": p.rewire_iterations, "seed": p.rng_seed,
            "selection": p.selection,
        },
    }


def with_overrides(s: Scenario, **changes) -> Scenario:
    """Replace planner settings (None values are ignored)."""
    changes = {k: v for k, v in changes.items() if v is not None}
    if not changes:
        return s
    try:
        return replace(s, planner=replace(s.planner, **changes))
    except ValueError as exc:
        raise ScenarioError("planner", str(exc)) from None


# ---------------------------------------------------------------- solution record

def stance_sides(n: int, first_p_y: float) -> List[str]:
    """Alternating stance labels, starting from the side of the first foothold."""
    first = "right" if first_p_y < 0.0 else "left"
    other = "left" if first == "right" else "right"
    return [first if i % 2 == 0 else other for i in range(n)]


@dataclass
class StepRow:
    step: int
    foot_x: float
    foot_y: float
    side: str
    t_switch: float
    t_apex: float
    arrival_time: float
    config: Tuple[float, float, float]


@dataclass
class SolutionRecord:
    rows: List[StepRow]
    steps: int
    duration: float
    tree_size: int
    iterations: int
    rewire_accepted: int
    raw_steps: int = 0
    raw_duration: float = 0.0


def make_record(result: PlanResult) -> SolutionRecord:
    sol = result.solution
    sides = stance_sides(len(sol.nodes), sol.nodes[0].loco.p_y)
    rows = []
    for i, (n, side) in enumerate(zip(sol.nodes, sides)):
        rows.append(StepRow(i, n.footstep[0], n.footstep[1], side, n.loco.t_switch,
                            n.loco.t_apex, n.arrival_time, tuple(n.config)))
    return SolutionRecord(
        rows, sol.steps, sol.duration, result.diagnostics.tree_size,
        result.diagnostics.iterations, result.rewire.accepted if result.rewire else 0,
        result.raw_solution.steps, result.raw_solution.duration,
    )


# ---------------------------------------------------------------- CoM sampling

def step_com(parent: Node, node: Node, lipm: LipmParams, t: float):
    """Global CoM position and velocity ``t`` seconds into ``node``'s step."""
    m = node.loco
    w = omega(lipm, m.p_x)
    if t <= m.t_switch:
        s = parent.state
        x = state_at(s.x, s.p_x, w, t)
        y = state_at(s.y, s.p_y, w, t)
    else:
        dt = t - m.duration
        x = state_at(PendulumState(m.p_x, m.xd_apex), m.p_x, w, dt)
        y = state_at(PendulumState(m.y_apex, m.yd_apex), m.p_y, w, dt)
    pose = parent.config.pose
    return to_global(pose, (x.pos, y.pos)), vector_to_global(pose, (x.vel, y.vel))


def sample_com_trajectory(nodes: Sequence[Node], lipm: LipmParams, dt: float):
    """Rows (t, x, y) on the grid k*dt plus every step boundary.

    Grid instants that coincide with a boundary are emitted once.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    out = []
    root = nodes[0]
    s = root.state
    p0 = to_global(root.config.pose, (s.x.pos, s.y.pos))
    out.append((root.arrival_time, p0[0], p0[1]))
    k = 1
    for parent, node in zip(nodes[:-1], nodes[1:]):
        t0, t1 = parent.arrival_time, node.arrival_time
        while k * dt < t1:
            t = k * dt
            if t > t0:
                p, _ = step_com(parent, node, lipm, t - t0)
                out.append((t, p[0], p[1]))
            k += 1
        if k * dt == t1:
            k += 1
        p, _ = step_com(parent, node, lipm, node.loco.duration)
        out.append((t1, p[0], p[1]))
    return out


# ---------------------------------------------------------------- export

def result_document(scenario: Scenario, result: PlanResult) -> dict:
    diag = result.diagnostics.as_dict()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "status": "solved" if result.success else "no solution found",
        "seed": scenario.planner.rng_seed,
        "backend": kernels.BACKEND,
        "diagnostics": diag,
        "scenario": scenario_to_dict(scenario),
    }
    if result.success:
        rec = make_record(result)
        doc["totals"] = {
            "steps": rec.steps, "duration": rec.duration, "tree_size": rec.tree_size,
            "iterations": rec.iterations, "rewire_accepted": rec.rewire_accepted,
            "raw_steps": rec.raw_steps, "raw_duration": rec.raw_duration,
        }
        doc["steps"] = [
            {"step": r.step, "footstep": [r.foot_x, r.foot_y], "side": r.side,
             "t_switch": r.t_switch, "t_apex": r.t_apex, "arrival_time": r.arrival_time,
             "config": list(r.config)}
            for r in rec.rows
        ]
        doc["locomotion"] = [n.loco.as_dict() for n in result.solution.nodes]
        doc["raw_configs"] = [list(n.config) for n in result.raw_solution.nodes]
        if result.rewire is not None:
            doc["rewire"] = {"attempts": result.rewire.attempts,
                             "accepted": result.rewire.accepted,
                             "duration_log": result.rewire.duration_log}
    return doc


def write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def write_csv(out_dir: Path, result: PlanResult, lipm: LipmParams, dt: float) -> List[Path]:
    com_path = out_dir / "com.csv"
    foot_path = out_dir / "footsteps.csv"
    with open(com_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y"])
        for row in sample_com_trajectory(result.solution.nodes, lipm, dt):
            w.writerow([repr(v) for v in row])
    rec = make_record(result)
    with open(foot_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "foot_x", "foot_y", "side", "t_switch", "t_apex",
                    "arrival_time", "x", "y", "theta"])
        for r in rec.rows:
            w.writerow([r.step, repr(r.foot_x), repr(r.foot_y), r.side, repr(r.t_switch),
                        repr(r.t_apex), repr(r.arrival_time)] + [repr(v) for v in r.config])
    return [com_path, foot_path]


def _poly(points: Iterable[Tuple[float, float]], **attrs) -> str:
    pts = " ".join(f"{x:.4f},{y:.4f}" for x, y in points)
    extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<polyline points="{pts}" fill="none" {extra}/>'


def render_svg(scenario: Scenario, result: PlanResult, layers: Sequence[str], dt: float = 0.05) -> str:
    """Top-down view; y is flipped so that +y points up."""
    xlo, xhi, ylo, yhi = scenario.world.bounds.xy
    pad = 0.5
    width, height = xhi - xlo + 2 * pad, yhi - ylo + 2 * pad
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{xlo - pad:.4f} {-yhi - pad:.4f} '
        f'{width:.4f} {height:.4f}" width="{width * 40:.0f}" height="{height * 40:.0f}">',
        '<g transform="scale(1,-1)">',
    ]
    if "walls" in layers:
        parts.append(f'<rect x="{xlo}" y="{ylo}" width="{xhi - xlo}" height="{yhi - ylo}" '
                     'fill="none" stroke="black" stroke-width="0.05"/>')
        for o in scenario.world.obstacles:
            if o.is_static:
                parts.append(_poly(obstacle_pose_at(o, 0.0).corners() + [obstacle_pose_at(o, 0.0).corners()[0]],
                                   stroke="#c0392b", stroke_width="0.04", fill_opacity="0.5"))
    if "obstacles" in layers:
        horizon = result.solution.duration if result.success else 60.0
        for o in scenario.world.obstacles:
            if o.is_static:
                continue
            per = period(o)
            span = min(horizon, per) if per else horizon
            track = [obstacle_pose_at(o, span * i / 200).center for i in range(201)]
            parts.append(_poly(track, stroke="#e74c3c", stroke_width="0.03", stroke_dasharray="0.15,0.1"))
            box = obstacle_pose_at(o, 0.0).corners()
            parts.append(_poly(box + [box[0]], stroke="gray", stroke_width="0.04"))
    if "tree" in layers:
        for n in result.tree.nodes:
            parts.append(f'<circle cx="{n.config.x:.4f}" cy="{n.config.y:.4f}" r="0.03" fill="#7f8c8d"/>')
    if result.success:
        if "raw" in layers:
            parts.append(_poly([(n.config.x, n.config.y) for n in result.raw_solution.nodes],
                               stroke="blue", stroke_width="0.05"))
        if "rewired" in layers:
            parts.append(_poly([(n.config.x, n.config.y) for n in result.solution.nodes],
                               stroke="red", stroke_width="0.05"))
        if "com" in layers:
            com = sample_com_trajectory(result.solution.nodes, scenario.lipm, dt)
            parts.append(_poly([(x, y) for _, x, y in com], stroke="black", stroke_width="0.02"))
        if "footsteps" in layers:
            sides = stance_sides(len(result.solution.nodes), result.solution.nodes[0].loco.p_y)
            for n, side in zip(result.solution.nodes, sides):
                color = "#27ae60" if side == "left" else "#8e44ad"
                parts.append(f'<circle cx="{n.footstep[0]:.4f}" cy="{n.footstep[1]:.4f}" '
                             f'r="0.06" fill="{color}"/>')
    q = scenario.q_goal
    parts.append(f'<circle cx="{q.x}" cy="{q.y}" r="{scenario.planner.goal_tolerance[0] * 4}" '
                 'fill="none" stroke="green" stroke-width="0.04"/>')
    parts.append("</g></svg>")
    return "\n".join(parts) + "\n"


def export(
    scenario: Scenario,
    result: PlanResult,
    out_dir,
    formats: Sequence[str] = FORMATS,
    dt: float = 0.01,
    layers: Sequence[str] = LAYERS,
) -> List[Path]:
    """Write the requested artifacts; returns the created paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    if "json" in formats:
        p = out / "result.json"
        write_json(p, result_document(scenario, result))
        written.append(p)
    if "csv" in formats and result.success:
        written.extend(write_csv(out, result, scenario.lipm, dt))
    if "svg" in formats:
        p = out / "plan.svg"
        p.write_text(render_svg(scenario, result, layers), encoding="utf-8")
        written.append(p)
    return written


def default_out_dir() -> str:
    return os.environ.get(OUT_DIR_ENV, "bipedrrt_out")
