"""Command-line front end.

Map inputs are either JSON files::

    {"dim": d, "repr": "kraus" | "transfer" | "choi", "data": ...}

with complex entries written as ``[re, im]`` and matrices as row-major nested
lists (Kraus data is a list of matrices; an optional ``"signs"`` list of +-1
allows non-CP maps), or ``{"dim": n, "repr": "stochastic", "data": [[...]]}``
with real entries for classical maps; or catalog specs such as
``catalog:depolarizing?p=1.5``.

Exit codes: 0 clean, 2 violation or witness found, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__, certifier, geometry, maps, matcore
from .certifier import CertConfig
from .monotone import CATALOG_F, GENERATORS, MONOTONE, get_generator, get_monotone

EXIT_CLEAN, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


def _env_float(name: str, default: float) -> float:
    return float(os.environ.get(f"CONTRACTIVITY_{name}", default))


def parse_map_file(source: str):
    """Load a map from a file or ``catalog:`` spec; flags ride along on the object."""
    return maps.load_map(source)


def load_matrix(arg: str) -> np.ndarray:
    """Matrix JSON from a file path, or inline when the argument starts with ``[``."""
    if arg.lstrip().startswith("["):
        data = json.loads(arg)
    else:
        with open(arg) as fh:
            data = json.load(fh)
    return matcore.matrix_from_json(data)


def _config_from_args(args) -> CertConfig:
    ancilla = getattr(args, "ancilla", "auto")
    return CertConfig(
        f=getattr(args, "f", "sld"),
        n_samples=getattr(args, "samples", 1000),
        seed=args.seed,
        ratio_tol=_env_float("RATIO_TOL", 1e-8),
        eta0=getattr(args, "eta0", 0.1),
        levels=getattr(args, "levels", 20),
        bisection_tol=_env_float("BISECTION_TOL", 1e-10),
        ancilla_dim=None if ancilla in (None, "auto") else int(ancilla),
        mode=getattr(args, "mode", "states"),
        oracle_samples=getattr(args, "oracle_samples", 2000),
    )


def _map_summary(phi) -> dict:
    if isinstance(phi, maps.StochasticMap):
        return {"dim": phi.dim, "repr": "stochastic", "is_stochastic": phi.is_stochastic}
    tp_ok, tp_res = maps.is_tp(phi)
    return {"dim": phi.dim, "repr": phi.repr, "name": phi.name,
            "is_hp": maps.is_hermitian_preserving(phi), "is_tp": tp_ok, "tp_residual": tp_res}


def _need_quantum(phi):
    if not isinstance(phi, maps.LinearMap):
        raise ValueError("this subcommand needs a quantum map (kraus/transfer/choi), not a stochastic matrix")
    return phi


# -- subcommands: each returns (payload, exit_code) -----------------------------------


def cmd_certify(args, config):
    phi = _need_quantum(parse_map_file(args.map))
    report = certifier.certify(phi, config)
    payload = {"map": _map_summary(phi), **report.to_json()}
    return payload, EXIT_VIOLATION if report.has_violation else EXIT_CLEAN


def cmd_witness(args, config):
    phi = _need_quantum(parse_map_file(args.map))
    if args.ancilla:
        phi = maps.tensor_identity(phi, args.ancilla)
    if args.contrast:
        try:
            w = certifier.contrast_witness(phi, args.contrast, config)
        except certifier.NotFound as exc:
            return {"map": _map_summary(phi), "found": False, "reason": str(exc)}, EXIT_CLEAN
        return {"map": _map_summary(phi), "found": True, "contrast_witness": w.to_json()}, EXIT_VIOLATION
    try:
        w = certifier.witness_search(phi, config.f, config)
    except certifier.NotFound as exc:
        return {"map": _map_summary(phi), "found": False, "reason": str(exc)}, EXIT_CLEAN
    return {"map": _map_summary(phi), "found": True, "witness": w.to_json(),
            "replay_ratio": w.replay(phi)}, EXIT_VIOLATION


def cmd_metric(args, config):
    pi = load_matrix(args.state)
    a = load_matrix(args.a)
    b = load_matrix(args.b) if args.b else None
    value = geometry.fisher_metric(pi, a, b, f=args.f)
    return {"value": value, "f": get_monotone(args.f).name,
            "basepoint_mineig": matcore.min_eigenvalue(pi)}, EXIT_CLEAN


def cmd_divergence(args, config):
    rho = load_matrix(args.rho)
    sigma = load_matrix(args.sigma)
    value = geometry.contrast_eval(rho, sigma, args.g)
    return {"value": value, "g": get_generator(args.g).name,
            "basepoint_mineig": min(matcore.min_eigenvalue(rho), matcore.min_eigenvalue(sigma))}, EXIT_CLEAN


def cmd_contract_test(args, config):
    phi = _need_quantum(parse_map_file(args.map))
    if args.g:
        res = certifier.contrast_contraction_test(phi, args.g, config)
    else:
        res = certifier.sample_contraction_test(phi, config.f, config)
    return {"map": _map_summary(phi), **res.to_json()}, EXIT_VIOLATION if res.violated else EXIT_CLEAN


def cmd_classical(args, config):
    t = parse_map_file(args.map)
    if not isinstance(t, maps.StochasticMap):
        raise ValueError("classical subcommand needs a stochastic-matrix map")
    res = certifier.classical_contraction_test(t, config)
    return {"map": _map_summary(t), **res.to_json()}, EXIT_CLEAN if res.contracts else EXIT_VIOLATION


def cmd_catalog(args, config):
    if not args.spec:
        return {"maps": sorted(maps.CATALOG), "monotone": sorted(MONOTONE),
                "generators": sorted(GENERATORS) + ["power<alpha>"]}, EXIT_CLEAN
    phi = parse_map_file(args.spec if args.spec.startswith("catalog:") else "catalog:" + args.spec)
    return {"map": phi.to_json()}, EXIT_CLEAN


def sweep(family: str, param: str, grid, config: CertConfig, fixed: dict | None = None) -> list[dict]:
    """Certify ``catalog:<family>?<param>=x`` for each ``x`` in ``grid``."""
    rows = []
    for x in grid:
        phi = maps.catalog(family, **{**(fixed or {}), param: x})
        report = certifier.certify(phi, config)
        rows.append({param: float(x), "classification": report.classification,
                     "oracle_classification": report.oracle_classification})
    return rows


def cmd_sweep(args, config):
    grid = [float(x) for x in args.grid.split(",") if x.strip()] if args.grid else []
    fixed = dict(kv.split("=", 1) for kv in args.fixed) if args.fixed else {}
    rows = sweep(args.family, args.param, grid, config, fixed)
    violated = any(r["classification"] != "CPTP" for r in rows)
    return {"family": args.family, "param": args.param, "rows": rows}, EXIT_VIOLATION if violated else EXIT_CLEAN


def rows_to_csv(rows: list[dict], param: str) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=[param, "classification", "oracle_classification"])
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# -- parser ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 keeps meaning "violation found"."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="contractivity",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="Tolerance overrides: CONTRACTIVITY_TOL_PSD, CONTRACTIVITY_TOL_INTERIOR, "
               "CONTRACTIVITY_RATIO_TOL, CONTRACTIVITY_BISECTION_TOL.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, f=True):
        sp.add_argument("--seed", type=int, default=7, help="RNG seed (default 7)")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        if f:
            sp.add_argument("--f", default="sld", help=f"monotone function: {', '.join(CATALOG_F)}, from_g:<g>")

    sp = sub.add_parser("certify", help="classify a map (CPTP / PTP-not-CP / NonPositive / ...)")
    sp.add_argument("--map", required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--ancilla", default="auto")
    sp.add_argument("--mode", choices=("states", "psd"), default="states")
    sp.add_argument("--oracle-samples", type=int, default=2000)
    common(sp)

    sp = sub.add_parser("witness", help="constructive expansion-witness search")
    sp.add_argument("--map", required=True)
    sp.add_argument("--eta0", type=float, default=0.1)
    sp.add_argument("--levels", type=int, default=20)
    sp.add_argument("--mode", choices=("states", "psd"), default="states")
    sp.add_argument("--contrast", metavar="G", help="search for a contrast-function witness of generator G instead")
    sp.add_argument("--ancilla", type=int, help="search on Phi (x) id_ancilla (a complete-positivity witness)")
    common(sp)

    sp = sub.add_parser("metric", help="monotone metric K_f(A, B) at a basepoint")
    sp.add_argument("--state", required=True)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b")
    common(sp)

    sp = sub.add_parser("divergence", help="contrast function H_g(rho || sigma)")
    sp.add_argument("--rho", required=True)
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--g", default="neglog", help=f"generator: {', '.join(GENERATORS)}, power<alpha>")
    common(sp, f=False)

    sp = sub.add_parser("contract-test", help="sampled metric (or --g contrast) contraction test")
    sp.add_argument("--map", required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--mode", choices=("states", "psd"), default="states")
    sp.add_argument("--g", help="test contrast function of this generator instead of the metric")
    common(sp)

    sp = sub.add_parser("classical", help="Fisher-Rao / relative-entropy contraction of a stochastic matrix")
    sp.add_argument("--map", required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--levels", type=int, default=20)
    common(sp, f=False)

    sp = sub.add_parser("catalog", help="list catalog maps, or emit one as map JSON")
    sp.add_argument("spec", nargs="?")
    common(sp, f=False)

    sp = sub.add_parser("sweep", help="certify a one-parameter catalog family over a grid")
    sp.add_argument("--family", default="depolarizing")
    sp.add_argument("--param", default="p")
    sp.add_argument("--grid", default="-1.2,-0.7,0,0.5,1.2")
    sp.add_argument("--fixed", nargs="*", metavar="K=V", help="extra fixed catalog parameters")
    sp.add_argument("--samples", type=int, default=300)
    sp.add_argument("--format", choices=("json", "csv"), default="csv")
    common(sp)
    return p


COMMANDS = {
    "certify": cmd_certify,
    "witness": cmd_witness,
    "metric": cmd_metric,
    "divergence": cmd_divergence,
    "contract-test": cmd_contract_test,
    "classical": cmd_classical,
    "catalog": cmd_catalog,
    "sweep": cmd_sweep,
}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        config = _config_from_args(args)
        payload, code = COMMANDS[args.command](args, config)
    except (ValueError, certifier.Condition1Violated, certifier.DegenerateAdjoint,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "sweep" and args.format == "csv":
        text = rows_to_csv(payload["rows"], args.param)
    else:
        report = {
            "tool": "contractivity",
            "version": __version__,
            "subcommand": args.command,
            "argv": list(argv) if argv is not None else sys.argv[1:],
            "config": config.to_json(),
            "payload": payload,
            "wall_clock": time.perf_counter() - start,
        }
        text = json.dumps(report, indent=2, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
