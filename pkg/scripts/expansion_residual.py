"""Residual of the second-order expansion of contrast functions versus eps.

For each generator and a handful of random qubit basepoints, print the
residual at each eps and the local log-log slopes, which approach 3.
"""

import argparse

import numpy as np

from contractivity import geometry, matcore

EPS = np.array([1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", nargs="*", default=["neglog", "xlogx", "quadratic", "power0.5"])
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--d", type=int, default=2)
    args = ap.parse_args()
    for g in args.g:
        for seed in range(args.instances):
            rng = np.random.default_rng(seed)
            pi = 0.7 * matcore.random_density(args.d, rng) + 0.3 * np.eye(args.d) / args.d
            a = matcore.random_tangent(args.d, rng)
            b = matcore.random_tangent(args.d, rng)
            res = np.array([geometry.local_expansion_residual(pi, a, b, g, e) for e in EPS])
            local = np.diff(np.log(res)) / np.diff(np.log(EPS))
            print(f"{g:>9} seed {seed}: local slopes {np.array2string(local, precision=3)}")


if __name__ == "__main__":
    main()
