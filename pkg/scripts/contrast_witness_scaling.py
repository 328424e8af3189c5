"""Contrast-function increase under a non-positive map as the image nears the boundary.

With a fixed perturbation size eps the image divergence grows like eps^2 / eta,
so halving eta roughly doubles h_out.
"""

import argparse

from contractivity import maps
from contractivity.certifier import CertConfig, contrast_witness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", default="neglog")
    ap.add_argument("--p", type=float, default=1.5)
    args = ap.parse_args()
    phi = maps.depolarizing(args.p)
    w = contrast_witness(phi, args.g, CertConfig())
    print(f"# depolarizing({args.p}), g={args.g}, eps={w.eps:.3g}")
    print("eta,h_in,h_out")
    for eta, h_in, h_out in w.trace:
        print(f"{eta:.6e},{h_in:.6e},{h_out:.6e}")


if __name__ == "__main__":
    main()
