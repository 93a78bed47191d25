"""Kinodynamic RRT over (x, y, heading) with elapsed walking time as the metric."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .core import TWO_PI, Config, KinematicParams, Pose2
from .dubins import intermediate_nodes, shortest_path
from .lipm import LipmParams, LocomotionParams, StanceState, apex_state
from .propagation import Branch, concatenate, propagate_branch
from .world import Bounds, World, first_blocked, prune_branch_for_collision

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlannerConfig:
    k_nearest: int = 20
    goal_bias: float = 0.1
    goal_tolerance: Tuple[float, float] = (0.05, 0.1)
    max_iterations: int = 200_000
    rewire_iterations: int = 5_000
    rng_seed: int = 0
    # exclude_truncated: branches that could not walk all the way to the
    # sample only compete if every candidate failed.
    # prefix_duration: every non-empty branch competes on its usable prefix.
    selection: str = "exclude_truncated"
    workers: int = 1
    debug: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.goal_bias < 1.0):
            raise ValueError("goal_bias must lie in (0, 1)")
        if self.k_nearest < 1:
            raise ValueError("k_nearest must be at least 1")
        if self.max_iterations < 0 or self.rewire_iterations < 0:
            raise ValueError("iteration budgets must be non-negative")
        if self.selection not in ("exclude_truncated", "prefix_duration"):
            raise ValueError(f"unknown selection mode {self.selection!r}")
        if not (0 <= self.rng_seed < 2**64):
            raise ValueError("rng_seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class Node:
    id: int
    parent: Optional[int]
    config: Config
    loco: LocomotionParams
    arrival_time: float
    # apex state of this node's step, in this node's own frame
    state: StanceState
    footstep: Tuple[float, float]


class Tree:
    """Configuration tree and its locomotion mirror (each node carries both)."""

    def __init__(self, root: Node):
        self.nodes: List[Node] = []
        self._xyz = np.empty((1024, 3))
        self.add(root)

    def __len__(self) -> int:
        return len(self.nodes)

    def add(self, node: Node) -> int:
        n = len(self.nodes)
        if n == self._xyz.shape[0]:
            self._xyz = np.concatenate([self._xyz, np.empty_like(self._xyz)])
        self._xyz[n] = (node.config.x, node.config.y, node.config.theta)
        self.nodes.append(node)
        return n

    @property
    def xs(self) -> np.ndarray:
        return self._xyz[: len(self.nodes), 0]

    @property
    def ys(self) -> np.ndarray:
        return self._xyz[: len(self.nodes), 1]

    @property
    def thetas(self) -> np.ndarray:
        return self._xyz[: len(self.nodes), 2]

    def path_to(self, node_id: int) -> List[Node]:
        out = []
        cur: Optional[int] = node_id
        while cur is not None:
            out.append(self.nodes[cur])
            cur = self.nodes[cur].parent
        return out[::-1]

    def check_invariants(self) -> None:
        root = self.nodes[0]
        assert root.parent is None, "root must not have a parent"
        for node in self.nodes[1:]:
            assert node.parent is not None and 0 <= node.parent < node.id, "bad parent link"
            parent = self.nodes[node.parent]
            assert node.arrival_time > parent.arrival_time, "arrival times must increase"


def make_root(q_start: Config, m_start: LocomotionParams) -> Node:
    """Root node; ``m_start`` is given in the global frame."""
    global_frame = Pose2((0.0, 0.0), 0.0)
    state = apex_state(m_start).reframe(global_frame, q_start.pose)
    return Node(0, None, q_start, m_start, 0.0, state, (m_start.p_x, m_start.p_y))


def sample_config(bounds: Bounds, rng: np.random.Generator) -> Config:
    """Uniform sample; the heading is drawn from [lo, hi) of the third axis."""
    u = rng.random(3)
    vals = [lo + (hi - lo) * float(ui) for lo, hi, ui in zip(bounds.lo, bounds.hi, u)]
    return Config(vals[0], vals[1], vals[2])


def k_closest(tree: Tree, q_s: Config, k: int, r_min: float) -> List[int]:
    """Ids of the k nodes with the shortest Dubins path to ``q_s`` (ties by id)."""
    lengths = kernels.dubins_lengths(tree.xs, tree.ys, tree.thetas, q_s.x, q_s.y, q_s.theta, r_min)
    n = lengths.shape[0]
    if k >= n:
        cand = np.arange(n)
    else:
        kth = np.partition(lengths, k - 1)[k - 1]
        cand = np.flatnonzero(lengths <= kth)
    order = np.lexsort((cand, lengths[cand]))
    return [int(i) for i in cand[order][:k]]


def select_nearest_by_time(
    candidates: Sequence[Branch], mode: str = "exclude_truncated"
) -> Optional[int]:
    """Index of the winning candidate, or None when every branch is empty.

    Durations equal within 1e-12 keep the earlier candidate.
    """
    usable = [(i, b) for i, b in enumerate(candidates) if len(b) > 0]
    if not usable:
        return None
    if mode == "exclude_truncated":
        complete = [(i, b) for i, b in usable if b.reached_target]
        if complete:
            return _fastest(complete)
        longest = max(len(b) for _, b in usable)
        return _fastest([(i, b) for i, b in usable if len(b) == longest])
    return _fastest(usable)


def _fastest(pairs) -> int:
    best_i, best_t = None, math.inf
    for i, b in pairs:
        t = b.duration
        if t < best_t - 1e-12:
            best_i, best_t = i, t
    return best_i


def candidate_branch(
    node: Node, q_s: Config, kin: KinematicParams, lipm: LipmParams
) -> Branch:
    path = shortest_path(node.config, q_s, kin.r_min)
    configs = intermediate_nodes(path, kin.s_max)
    return propagate_branch(node.config, configs, node.state, lipm, kin.V, node.arrival_time)


def extend(tree: Tree, parent_id: int, branch: Branch) -> List[int]:
    """Append the nodes of ``branch`` below ``parent_id``; returns their ids."""
    new_ids = []
    parent = parent_id
    for cfg, m, st, foot, t in zip(
        branch.configs, branch.params, branch.states, branch.footsteps, branch.arrival_times
    ):
        node = Node(len(tree), parent, cfg, m, t, st, foot)
        parent = tree.add(node)
        new_ids.append(parent)
    return new_ids


@dataclass
class Solution:
    """Root-to-goal node sequence; node i > 0 stores its step in node i-1's frame."""

    nodes: List[Node]

    @property
    def configs(self) -> List[Config]:
        return [n.config for n in self.nodes]

    @property
    def duration(self) -> float:
        return self.nodes[-1].arrival_time - self.nodes[0].arrival_time

    @property
    def steps(self) -> int:
        return len(self.nodes) - 1

    def as_branch(self) -> Branch:
        """Everything after the root as a single branch."""
        rows = []
        for n in self.nodes[1:]:
            m, s = n.loco, n.state
            rows.append(
                (m.p_x, m.xd_apex, m.yd_apex, m.t_switch, m.t_apex, m.p_y, m.y_apex)
                + s.as_tuple()
            )
        return Branch(
            self.nodes[0].config, [n.config for n in self.nodes[1:]], rows,
            self.nodes[0].arrival_time, len(rows),
        )


def nodes_from_branch(start_id: int, parent: Node, branch: Branch) -> List[Node]:
    out = []
    pid = parent.id
    for j, (cfg, m, st, foot, t) in enumerate(zip(
        branch.configs, branch.params, branch.states, branch.footsteps, branch.arrival_times
    )):
        out.append(Node(start_id + j, pid, cfg, m, t, st, foot))
        pid = start_id + j
    return out


@dataclass
class Diagnostics:
    success: bool = False
    iterations: int = 0
    tree_size: int = 1
    goal_samples: int = 0
    skipped_extensions: int = 0
    dynamically_truncated: int = 0
    collision_pruned: int = 0
    nodes_added: int = 0
    goal_node: Optional[int] = None
    goal_position_error: Optional[float] = None
    goal_heading_error: Optional[float] = None
    message: str = ""

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RewireResult:
    solution: Solution
    accepted: int = 0
    attempts: int = 0
    duration_log: List[float] = field(default_factory=list)


@dataclass
class PlanResult:
    success: bool
    tree: Tree
    diagnostics: Diagnostics
    raw_solution: Optional[Solution] = None
    solution: Optional[Solution] = None
    rewire: Optional[RewireResult] = None


class Planner:
    def __init__(
        self,
        q_start: Config,
        q_goal: Config,
        m_start: LocomotionParams,
        kin: KinematicParams,
        lipm: LipmParams,
        world: World,
        bounds: Bounds,
        config: PlannerConfig = PlannerConfig(),
    ):
        self.q_start = q_start
        self.q_goal = q_goal
        self.m_start = m_start
        self.kin = kin
        self.lipm = lipm
        self.world = world
        self.bounds = bounds
        self.config = config
        self.rng = np.random.Generator(np.random.PCG64(config.rng_seed))

    def _candidates(self, tree: Tree, ids: Sequence[int], q_s: Config, pool) -> List[Branch]:
        nodes = [tree.nodes[i] for i in ids]
        if pool is None:
            return [candidate_branch(n, q_s, self.kin, self.lipm) for n in nodes]
        return list(pool.map(lambda n: candidate_branch(n, q_s, self.kin, self.lipm), nodes))

    def grow(self) -> Tuple[Tree, Diagnostics]:
        cfg = self.config
        tree = Tree(make_root(self.q_start, self.m_start))
        diag = Diagnostics()
        if not kernels.first_collision(
            [self.m_start.p_x], [self.m_start.p_y], [0.0], self.world.packed,
            self.world.bounds.xy, self.world.safety_radius,
        ) < 0:
            diag.message = "start footstep is in collision"
            return tree, diag
        pos_tol, ang_tol = cfg.goal_tolerance
        pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
        try:
            for it in range(cfg.max_iterations):
                diag.iterations = it + 1
                if self.rng.random() < cfg.goal_bias:
                    q_s = self.q_goal
                    diag.goal_samples += 1
                else:
                    q_s = sample_config(self.bounds, self.rng)
                ids = k_closest(tree, q_s, cfg.k_nearest, self.kin.r_min)
                branches = self._candidates(tree, ids, q_s, pool)
                win = select_nearest_by_time(branches, cfg.selection)
                if win is None:
                    diag.skipped_extensions += 1
                    continue
                best = branches[win]
                if best.dynamically_truncated:
                    diag.dynamically_truncated += 1
                pruned = prune_branch_for_collision(best, self.world)
                if pruned.collision_pruned:
                    diag.collision_pruned += 1
                new_ids = extend(tree, ids[win], pruned)
                diag.nodes_added += len(new_ids)
                if cfg.debug:
                    tree.check_invariants()
                for nid in new_ids:
                    node = tree.nodes[nid]
                    if node.config.close_to(self.q_goal, pos_tol, ang_tol):
                        diag.success = True
                        diag.goal_node = nid
                        break
                if diag.success:
                    break
        finally:
            if pool is not None:
                pool.shutdown()
        diag.tree_size = len(tree)
        if diag.success:
            g = tree.nodes[diag.goal_node].config
            diag.goal_position_error = math.hypot(g.x - self.q_goal.x, g.y - self.q_goal.y)
            diag.goal_heading_error = abs(
                math.remainder(g.theta - self.q_goal.theta, TWO_PI)
            )
            diag.message = "solved"
        elif not diag.message:
            diag.message = "no solution found"
        return tree, diag

    def plan(self, rewire: bool = True) -> PlanResult:
        tree, diag = self.grow()
        if not diag.success:
            return PlanResult(False, tree, diag)
        raw = Solution(tree.path_to(diag.goal_node))
        result = PlanResult(True, tree, diag, raw_solution=raw, solution=raw)
        if rewire and self.config.rewire_iterations > 0:
            result.rewire = self.rewire(raw)
            result.solution = result.rewire.solution
        return result

    def rewire(self, solution: Solution, iterations: Optional[int] = None) -> RewireResult:
        return rewire(
            solution, self.world, self.kin, self.lipm, self.rng,
            self.config.rewire_iterations if iterations is None else iterations,
        )


def _renumber(nodes: List[Node]) -> List[Node]:
    out = []
    for i, n in enumerate(nodes):
        out.append(Node(i, None if i == 0 else i - 1, n.config, n.loco, n.arrival_time, n.state, n.footstep))
    return out


def rewire(
    solution: Solution,
    world: World,
    kin: KinematicParams,
    lipm: LipmParams,
    rng: np.random.Generator,
    iterations: int,
) -> RewireResult:
    """Shortcut the solution with direct Dubins connections that are not slower.

    After a splice every downstream step is recomputed and re-checked through
    time; the splice is dropped if the tail becomes infeasible or the total
    duration would grow.
    """
    nodes = _renumber(solution.nodes)
    result = RewireResult(Solution(nodes), duration_log=[Solution(nodes).duration])
    for _ in range(iterations):
        result.attempts += 1
        if len(nodes) < 3:
            break
        a, b = rng.choice(len(nodes), size=2, replace=False)
        m, n = (int(a), int(b)) if a < b else (int(b), int(a))
        if n - m < 2:
            continue
        q_m, q_n = nodes[m], nodes[n]
        alt = candidate_branch(q_m, q_n.config, kin, lipm)
        if not alt.reached_target:
            continue
        if alt.duration > (q_n.arrival_time - q_m.arrival_time):
            continue
        if first_blocked(alt.footsteps, alt.arrival_times, world) >= 0:
            continue
        tail_configs = [nd.config for nd in nodes[n + 1:]]
        tail = propagate_branch(
            q_n.config, tail_configs, alt.states[-1], lipm, kin.V, alt.arrival_times[-1]
        )
        if not tail.reached_target:
            continue
        if first_blocked(tail.footsteps, tail.arrival_times, world) >= 0:
            continue
        new_total = (tail.arrival_times[-1] if len(tail) else alt.arrival_times[-1]) - nodes[0].arrival_time
        if new_total > result.duration_log[-1]:
            continue
        spliced = concatenate(alt, tail)
        nodes = nodes[: m + 1] + nodes_from_branch(m + 1, nodes[m], spliced)
        result.accepted += 1
        result.duration_log.append(new_total)
    result.solution = Solution(nodes)
    return result
