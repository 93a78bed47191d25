"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--plan]

``--plan`` also times a full planning run of scenarios/gate.scenario with
each backend (in a subprocess, since the backend is chosen at import).
"""

from __future__ import annotations

import argparse
import math
import os
import subprocess
import sys
import timeit
from pathlib import Path

import numpy as np

from bipedrrt import _pykernels
from bipedrrt.core import Config
from bipedrrt.dubins import intermediate_nodes, shortest_path
from bipedrrt.world import Bounds, CircularMotion, LinearMotion, Obstacle, World

ROOT = Path(__file__).resolve().parent.parent
SEED = (0.0, 0.3, 0.0, 0.0, 0.0, -0.1)


def workloads(rng):
    n = 5000
    xs, ys = rng.uniform(-10, 10, n), rng.uniform(-10, 10, n)
    ths = rng.uniform(0, 2 * math.pi, n)
    q0 = Config(0.0, 0.0, 0.0)
    chain = [q0] + intermediate_nodes(shortest_path(q0, Config(4.0, 2.0, 1.0), 0.5), 0.17)
    cx, cy, ct = [c.x for c in chain], [c.y for c in chain], [c.theta for c in chain]
    obstacles = [Obstacle((float(x), float(y)), (0.3, 0.2), 0.4)
                 for x, y in rng.uniform(-10, 10, (40, 2))]
    obstacles += [Obstacle((0.0, 0.0), (0.3, 0.3), motion=LinearMotion((0.5, 0.2), travel=4.0)),
                  Obstacle((0.0, 0.0), (0.3, 0.3), motion=CircularMotion((2.0, 2.0), 1.5, 0.4))]
    world = World(tuple(obstacles), Bounds((-12, -12, 0), (12, 12, 1)), 0.3)
    m = 30
    px, py = rng.uniform(-10, 10, m), rng.uniform(-10, 10, m)
    t = np.sort(rng.uniform(0, 20, m))
    return {
        "dubins_lengths (5000 nodes)": lambda k: k.dubins_lengths(xs, ys, ths, 1.0, 2.0, 0.5, 0.5),
        f"propagate_chain ({len(chain) - 1} steps)":
            lambda k: k.propagate_chain(cx, cy, ct, SEED, 9.81, 0.0, 1.0, 0.3),
        "first_collision (30 footsteps, 42 boxes)":
            lambda k: k.first_collision(px, py, t, world.packed, world.bounds.xy, 0.3),
    }


def time_call(fn, repeat):
    number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-7)))
    best = min(timeit.repeat(fn, number=number, repeat=repeat))
    return best / number


def time_plan(pure: bool) -> float:
    env = dict(os.environ, BIPEDRRT_PURE_PYTHON="1" if pure else "0")
    code = (
        "import time\n"
        "from bipedrrt.cli_io import load_scenario, with_overrides\n"
        f"s = with_overrides(load_scenario(r'{ROOT / 'scenarios' / 'gate.scenario'}'), rewire_iterations=1000)\n"
        "t = time.perf_counter(); r = s.make_planner().plan()\n"
        "print(time.perf_counter() - t)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--plan", action="store_true", help="also time a full planning run")
    args = parser.parse_args(argv)
    try:
        from bipedrrt import _ckernels
    except ImportError:
        print("compiled kernels are not built; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    print(f"{'kernel':44s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for name, fn in workloads(rng).items():
        t_py = time_call(lambda: fn(_pykernels), args.repeat)
        t_c = time_call(lambda: fn(_ckernels), args.repeat)
        print(f"{name:44s} {t_py * 1e6:10.1f}us {t_c * 1e6:10.1f}us {t_py / t_c:7.1f}x")
    if args.plan:
        t_py, t_c = time_plan(True), time_plan(False)
        print(f"{'plan gate.scenario (1000 rewire iters)':44s} {t_py:11.2f}s {t_c:11.2f}s {t_py / t_c:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
