"""Compiled kernel vs pure-Python fallback: episode throughput per environment.

    python3 benchmarks/bench_backends.py [--samples 20] [--episodes 5] [--arch 4]

Both backends get the same weights and seeds; the script also checks the
scores agree bit for bit.
"""

import argparse
import time

import numpy as np

from rwg import backend
from rwg.envs import make, registered
from rwg.policy import parse_arch, sample_weights
from rwg.seeding import episode_seed, weight_seed


def time_block(env, arch, weights, seeds, name, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        scores = backend.run_block(env, arch, weights, seeds, name)
        best = min(best, time.perf_counter() - t0)
    return best, scores


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--episodes", type=int, default=5)
    p.add_argument("--arch", default="4")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    if not backend.HAVE_COMPILED:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    print(f"{'env':<26} {'python s':>9} {'compiled s':>11} {'speedup':>8}  identical")
    for name in registered():
        env = make(name)
        arch = parse_arch(args.arch).bind(env.spec)
        weights = np.stack([sample_weights(arch, weight_seed(args.seed, 0, n)) for n in range(args.samples)])
        seeds = [[episode_seed(args.seed, 0, n, e) for e in range(args.episodes)] for n in range(args.samples)]
        t_py, s_py = time_block(env, arch, weights, seeds, "python", 1)
        t_c, s_c = time_block(env, arch, weights, seeds, "compiled", args.repeat)
        same = s_py.tobytes() == s_c.tobytes()
        print(f"{name:<26} {t_py:>9.3f} {t_c:>11.4f} {t_py / t_c:>7.0f}x  {same}")


if __name__ == "__main__":
    main()
