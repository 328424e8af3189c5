"""Print the eta trace of boundary-approach witnesses and the fitted log-log slope.

A slope near -1 means the metric ratio diverges like 1/eta as the image state
approaches the boundary of the positive cone.
"""

import argparse

from contractivity import maps
from contractivity.certifier import CertConfig, witness_search

TARGETS = {
    "depolarizing(1.5)": lambda: maps.depolarizing(1.5),
    "depolarizing(-1.5)": lambda: maps.depolarizing(-1.5),
    "transpose x id2": lambda: maps.tensor_identity(maps.transpose(2), 2),
    "depolarizing(-0.7) x id2": lambda: maps.tensor_identity(maps.depolarizing(-0.7), 2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f", default="sld")
    ap.add_argument("--levels", type=int, default=20)
    args = ap.parse_args()
    config = CertConfig(f=args.f, levels=args.levels)
    for label, make in TARGETS.items():
        phi = make()
        w = witness_search(phi, args.f, config)
        print(f"# {label}: max ratio {w.ratio:.4g} at eta {w.eta:.3g}, slope {w.eta_slope():.3f}, "
              f"replay {w.replay(phi):.4g}")
        print("eta,ratio")
        for eta, ratio in w.eta_trace:
            print(f"{eta:.6e},{ratio:.6e}")
        print()


if __name__ == "__main__":
    main()
