"""Certifying positivity and complete positivity through metric contraction.

A Hermitian-preserving map that contracts a monotone metric everywhere it is
defined is positive and trace non-increasing; if ``Phi kron id_d`` contracts
as well, it is completely positive. This module turns that statement into
tests:

* random sampling of the contraction ratio ``K_out / K_in``;
* a constructive search for an expansion witness. Starting from an interior
  point ``pi`` whose image is interior and a state ``sigma`` whose image is
  not positive, walk along the segment between them towards the point where
  the image first becomes singular. Near that point the image has an
  eigenvalue ``eta`` and the output metric blows up like ``1/eta`` along the
  direction ``Phi^dagger(|psi_eta><psi_eta|)``;
* the same constructions for contrast functions and for classical stochastic
  matrices.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import geometry, maps, matcore
from .geometry import SingularBasepoint
from .maps import LinearMap, OracleVerdict, StochasticMap
from .monotone import get_generator, get_monotone

CLASSIFICATIONS = ("CPTP", "PTP-not-CP", "NonPositive", "NotHP", "TraceIncreasing")


class SkippedSample(Exception):
    """A sample whose basepoint or image is not interior; not a violation."""


class Condition1Violated(RuntimeError):
    """No sampled interior point is mapped to the interior."""


class NotFound(RuntimeError):
    """Witness search found nothing to work with (the map looks positive)."""


class DegenerateAdjoint(RuntimeError):
    """``Phi^dagger(|psi><psi|)`` vanished; inconsistent with an interior image."""


@dataclass
class CertConfig:
    f: str = "sld"
    n_samples: int = 1000
    seed: int = 0
    ratio_tol: float = 1e-8
    eta0: float = 0.1
    levels: int = 20
    bisection_tol: float = 1e-10
    ancilla_dim: int | None = None
    mode: str = "states"
    oracle_samples: int = 2000
    oracle_refine: int = 50
    stop_at_first: bool = False
    contrast_levels: int = 12
    contrast_eps: float | None = None

    def __post_init__(self):
        if self.mode not in ("states", "psd"):
            raise ValueError(f"mode must be 'states' or 'psd', got {self.mode!r}")
        for name in ("ratio_tol", "eta0", "bisection_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_samples < 0 or self.levels < 0 or self.contrast_levels < 0:
            raise ValueError("sample and level counts must be non-negative")
        if self.ancilla_dim is not None and self.ancilla_dim < 1:
            raise ValueError("ancilla_dim must be >= 1")
        get_monotone(self.f)

    @property
    def eta_schedule(self) -> np.ndarray:
        return self.eta0 * 2.0 ** -np.arange(self.levels + 1)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def _sample_rng(seed, i: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(i)])


def _sample_point(d: int, rng, mode: str) -> tuple[np.ndarray, np.ndarray]:
    rho = matcore.random_density(d, rng)
    if mode == "psd":
        rho = rho * np.exp(rng.uniform(np.log(0.5), np.log(2.0)))
    drho = matcore.random_tangent(d, rng, traceless=(mode == "states"))
    return rho, drho


def _tangent_project(x: np.ndarray, mode: str) -> np.ndarray:
    x = matcore.hermitian(x)
    if mode == "states":
        x = x - np.trace(x).real / x.shape[0] * np.eye(x.shape[0])
    return x


# -- contraction ratio and sampling ---------------------------------------------------


def contraction_ratio(phi: LinearMap, f, rho, drho, tol_interior=None) -> float:
    """``K_{f,Phi(rho)}(Phi(drho), Phi(drho)) / K_{f,rho}(drho, drho)``."""
    f = get_monotone(f)
    try:
        k_in = geometry.fisher_metric(rho, drho, f=f, tol_interior=tol_interior)
        image = matcore.hermitian(phi(rho))
        k_out = geometry.fisher_metric(image, matcore.hermitian(phi(drho)), f=f, tol_interior=tol_interior)
    except SingularBasepoint as exc:
        raise SkippedSample(str(exc)) from exc
    if not k_in > 0:
        raise SkippedSample("zero-length tangent vector")
    return k_out / k_in


@dataclass
class ExpansionWitness:
    """A point and direction at which ``Phi`` expands the metric ``f``."""

    rho: np.ndarray = field(repr=False)
    drho: np.ndarray = field(repr=False)
    f: str
    ratio: float
    eta: float | None = None
    lambda_star: float | None = None
    psi: np.ndarray | None = field(default=None, repr=False)
    eta_trace: list = field(default_factory=list, repr=False)

    def replay(self, phi: LinearMap) -> float:
        return contraction_ratio(phi, self.f, self.rho, self.drho)

    def eta_slope(self) -> float:
        """Least-squares slope of ``log ratio`` against ``log eta`` over the trace."""
        if len(self.eta_trace) < 2:
            return float("nan")
        eta, ratio = np.array(self.eta_trace).T
        return float(np.polyfit(np.log(eta), np.log(ratio), 1)[0])

    def to_json(self) -> dict:
        return {
            "f": self.f,
            "ratio": self.ratio,
            "eta": self.eta,
            "lambda_star": self.lambda_star,
            "rho": matcore.matrix_to_json(self.rho),
            "drho": matcore.matrix_to_json(self.drho),
            "psi": None if self.psi is None else [[float(z.real), float(z.imag)] for z in self.psi],
            "eta_trace": [[float(e), float(r)] for e, r in self.eta_trace],
            "eta_slope": None if len(self.eta_trace) < 2 else self.eta_slope(),
        }


@dataclass
class ContractionResult:
    violated: bool
    n_effective: int
    n_skipped: int
    max_ratio: float
    witness: ExpansionWitness | None = None

    def to_json(self) -> dict:
        return {
            "violated": self.violated,
            "n_effective": self.n_effective,
            "n_skipped": self.n_skipped,
            "max_ratio": self.max_ratio,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def sample_contraction_test(phi: LinearMap, f=None, config: CertConfig | None = None) -> ContractionResult:
    """Sample ``(rho, drho)`` pairs; stop at the first ratio above ``1 + ratio_tol``."""
    config = config or CertConfig()
    f = get_monotone(config.f if f is None else f)
    n_eff = n_skip = 0
    max_ratio = -np.inf
    for i in range(config.n_samples):
        rho, drho = _sample_point(phi.dim, _sample_rng(config.seed, i), config.mode)
        try:
            r = contraction_ratio(phi, f, rho, drho)
        except SkippedSample:
            n_skip += 1
            continue
        n_eff += 1
        max_ratio = max(max_ratio, r)
        if r > 1 + config.ratio_tol:
            w = ExpansionWitness(rho, drho, f.name, r)
            return ContractionResult(True, n_eff, n_skip, max_ratio, w)
    if config.n_samples and n_eff == 0:
        raise Condition1Violated(f"none of {config.n_samples} sampled states has an interior image")
    return ContractionResult(False, n_eff, n_skip, float(max_ratio), None)


# -- boundary approach -----------------------------------------------------------------


def _lambda_min(h: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(matcore.hermitian(h))[0])


def _bisect(func, lo: float, hi: float, target: float, tol: float, max_iter: int = 200) -> tuple[float, float]:
    """Shrink ``[lo, hi]`` keeping ``func(lo) > target >= func(hi)``."""
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if func(mid) > target:
            lo = mid
        else:
            hi = mid
    return lo, hi


def find_interior_preimage(phi: LinearMap, config: CertConfig) -> np.ndarray:
    """An interior ``pi`` with interior image: maximally mixed first, then samples."""
    d = phi.dim
    pi = np.eye(d, dtype=complex) / d
    if matcore.is_interior(phi(pi)):
        return pi
    for i in range(max(config.n_samples, 100)):
        rho, _ = _sample_point(d, _sample_rng(config.seed + 1, i), config.mode)
        if matcore.is_interior(phi(rho)):
            return rho
    raise Condition1Violated("no sampled interior state has an interior image")


@dataclass
class BoundaryPath:
    """Segment ``rho_lambda = (1 - lambda) pi + lambda sigma`` crossing into non-positivity."""

    pi: np.ndarray
    sigma: np.ndarray
    lambda_star: float
    h0: float

    def point(self, lam: float) -> np.ndarray:
        return (1 - lam) * self.pi + lam * self.sigma


def boundary_path(phi: LinearMap, config: CertConfig, oracle: OracleVerdict | None = None) -> BoundaryPath:
    if not maps.is_hermitian_preserving(phi):
        raise ValueError("witness search needs a Hermitian-preserving map")
    pi = find_interior_preimage(phi, config)
    if oracle is None or oracle.worst_state is None:
        oracle = maps.positivity_oracle(phi, config.oracle_samples, config.oracle_refine, config.seed)
    tol = matcore.TOL_PSD * max(1.0, abs(np.trace(phi.choi).real))
    if oracle.min_pure_eigenvalue is None or oracle.min_pure_eigenvalue >= -tol:
        raise NotFound(f"positivity oracle found no negative direction (min {oracle.min_pure_eigenvalue})")
    psi = oracle.worst_state
    pure = np.outer(psi, psi.conj())
    if config.mode == "psd":
        pure = pure * np.trace(pi).real
    # pull the boundary state into the interior, keeping its image non-positive
    t = 1e-3
    while True:
        sigma = (1 - t) * pure + t * pi
        if matcore.is_interior(sigma) and _lambda_min(phi(sigma)) < 0:
            break
        t /= 2
        if t < 1e-12:
            raise NotFound("could not move the non-positive direction into the interior")
    img_pi, img_sigma = phi(pi), phi(sigma)

    def h(lam):
        return _lambda_min((1 - lam) * img_pi + lam * img_sigma)

    lo, hi = _bisect(h, 0.0, 1.0, 0.0, config.bisection_tol)
    return BoundaryPath(pi, sigma, 0.5 * (lo + hi), h(0.0))


@dataclass
class PathPoint:
    eta: float
    lam: float
    rho: np.ndarray
    psi: np.ndarray
    drho: np.ndarray


def _approach(phi: LinearMap, path: BoundaryPath, etas, mode: str) -> Iterator[PathPoint]:
    """Points on the pi-side of the crossing whose image has smallest eigenvalue eta."""
    img_pi, img_sigma = phi(path.pi), phi(path.sigma)

    def h(lam):
        return _lambda_min((1 - lam) * img_pi + lam * img_sigma)

    for eta in etas:
        if eta >= path.h0:
            continue
        lo, hi = 0.0, path.lambda_star
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = h(mid)
            if abs(val - eta) <= 1e-6 * eta or hi - lo <= 1e-16:
                break
            if val > eta:
                lo = mid
            else:
                hi = mid
        rho = path.point(mid)
        w, v = np.linalg.eigh(matcore.hermitian(phi(rho)))
        psi = v[:, 0]
        drho = _tangent_project(phi.adjoint(np.outer(psi, psi.conj())), mode)
        norm = np.linalg.norm(drho)
        if norm < 1e-12:
            raise DegenerateAdjoint(
                f"|Phi^dagger(psi psi^dagger)| = {norm:.2e} at eta = {eta:.2e}; "
                "the image would be singular everywhere"
            )
        yield PathPoint(float(eta), float(mid), rho, psi, drho / norm)


def witness_search(phi: LinearMap, f=None, config: CertConfig | None = None,
                   oracle: OracleVerdict | None = None) -> ExpansionWitness:
    """Constructive expansion witness following the boundary approach.

    All schedule levels are evaluated (unless ``stop_at_first``); the returned
    witness is the one with the largest ratio and carries the full
    ``(eta, ratio)`` trace.
    """
    config = config or CertConfig()
    f = get_monotone(config.f if f is None else f)
    path = boundary_path(phi, config, oracle)
    best = None
    trace = []
    for pt in _approach(phi, path, config.eta_schedule, config.mode):
        try:
            r = contraction_ratio(phi, f, pt.rho, pt.drho)
        except SkippedSample:
            continue
        trace.append((pt.eta, r))
        if r > 1 + config.ratio_tol and (best is None or r > best.ratio):
            best = ExpansionWitness(pt.rho, pt.drho, f.name, r, pt.eta, path.lambda_star, pt.psi)
            if config.stop_at_first:
                break
    if best is None:
        raise NotFound("no level of the eta schedule expanded the metric")
    best.eta_trace = trace
    return best


# -- trace monotonicity ------------------------------------------------------------------


@dataclass
class TraceVerdict:
    monotone: bool
    max_trace_ratio: float
    max_excess: float
    route_agreement: float
    n_checked: int
    n_metric_route: int
    trace_bound: float

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def trace_monotonicity_check(phi: LinearMap, config: CertConfig | None = None) -> TraceVerdict:
    """Check ``Tr Phi(rho) <= Tr rho`` on sampled PSD matrices.

    The metric route ``K_{f,Phi(rho)}(Phi(rho), Phi(rho)) = Tr Phi(rho)`` is
    evaluated wherever the image is interior and compared to the direct trace.
    The top eigenvector of ``Phi^dagger(I)`` is always included as a sample.
    """
    config = config or CertConfig()
    f = get_monotone(config.f)
    d = phi.dim
    samples = []
    w, v = np.linalg.eigh(matcore.hermitian(phi.adjoint(np.eye(d))))
    top = np.outer(v[:, -1], v[:, -1].conj())
    samples.append(0.99 * top + 0.01 * np.eye(d) / d)
    for i in range(config.n_samples):
        rng = _sample_rng(config.seed + 2, i)
        samples.append(matcore.random_density(d, rng) * np.exp(rng.uniform(np.log(0.5), np.log(2.0))))
    max_ratio = -np.inf
    max_excess = -np.inf
    agreement = 0.0
    n_metric = 0
    violated = False
    for rho in samples:
        tr_in = np.trace(rho).real
        img = matcore.hermitian(phi(rho))
        tr_out = np.trace(img).real
        max_ratio = max(max_ratio, tr_out / tr_in)
        max_excess = max(max_excess, tr_out - tr_in)
        if tr_out > tr_in + 1e-10 * max(1.0, tr_in):
            violated = True
        if matcore.is_interior(img):
            k = geometry.fisher_metric(img, img, f=f)
            agreement = max(agreement, abs(k - tr_out))
            n_metric += 1
    return TraceVerdict(not violated, float(max_ratio), float(max_excess), float(agreement),
                        len(samples), n_metric, float(w[-1]))


# -- certification pipeline -----------------------------------------------------------------


def classify_oracle(verdict: OracleVerdict) -> str:
    """Ground-truth classification from Choi / pure-state oracles."""
    if not verdict.is_hp:
        return "NotHP"
    if not verdict.is_positive:
        return "NonPositive"
    if not verdict.is_trace_nonincreasing:
        return "TraceIncreasing"
    if not verdict.is_cp:
        return "PTP-not-CP"
    return "CPTP"


@dataclass
class CertReport:
    hp: bool
    tp_residual: float
    classification: str
    base_contraction: ContractionResult | None = None
    base_witness: ExpansionWitness | None = None
    lifted_contraction: ContractionResult | None = None
    lifted_witness: ExpansionWitness | None = None
    ancilla_dim: int | None = None
    trace_monotone: TraceVerdict | None = None
    oracle_crosscheck: OracleVerdict | None = None
    oracle_classification: str | None = None
    notes: list = field(default_factory=list)

    @property
    def agrees_with_oracle(self) -> bool:
        return self.classification == self.oracle_classification

    @property
    def has_violation(self) -> bool:
        return self.classification != "CPTP"

    def to_json(self) -> dict:
        def j(x):
            return None if x is None else x.to_json()

        return {
            "classification": self.classification,
            "oracle_classification": self.oracle_classification,
            "hp": self.hp,
            "tp_residual": self.tp_residual,
            "ancilla_dim": self.ancilla_dim,
            "base_contraction": j(self.base_contraction),
            "base_witness": j(self.base_witness),
            "lifted_contraction": j(self.lifted_contraction),
            "lifted_witness": j(self.lifted_witness),
            "trace_monotone": j(self.trace_monotone),
            "oracle": j(self.oracle_crosscheck),
            "notes": list(self.notes),
        }


def certify(phi: LinearMap, config: CertConfig | None = None, oracle: OracleVerdict | None = None) -> CertReport:
    """Classify ``phi`` by contraction testing, with oracle cross-check attached.

    Precedence: NotHP, NonPositive (boundary witness), TraceIncreasing,
    NonPositive (unexplained sampled expansion), PTP-not-CP, CPTP.
    """
    config = config or CertConfig()
    f = get_monotone(config.f)
    hp = maps.is_hermitian_preserving(phi)
    tp_res = maps.tp_residual(phi)
    if not hp:
        return CertReport(False, tp_res, "NotHP", oracle_classification="NotHP",
                          notes=["Choi matrix is not Hermitian; contraction is undefined"])
    if oracle is None:
        oracle = maps.positivity_oracle(phi, config.oracle_samples, config.oracle_refine, config.seed)
    report = CertReport(True, tp_res, "CPTP", oracle_crosscheck=oracle,
                        oracle_classification=classify_oracle(oracle))

    report.base_contraction = sample_contraction_test(phi, f, config)
    if not oracle.is_positive:
        try:
            report.base_witness = witness_search(phi, f, config, oracle)
        except NotFound as exc:
            report.notes.append(f"base witness search: {exc}")

    report.trace_monotone = trace_monotonicity_check(phi, config)

    anc = config.ancilla_dim or phi.dim
    report.ancilla_dim = anc
    lifted = maps.tensor_identity(phi, anc)
    lifted_cfg = dataclasses.replace(config, mode="states")
    if report.base_witness is None:
        try:
            report.lifted_contraction = sample_contraction_test(lifted, f, lifted_cfg)
        except Condition1Violated as exc:
            report.notes.append(f"lifted sampling: {exc}")
        if not oracle.is_cp:
            lifted_oracle = maps.positivity_oracle(lifted, config.oracle_samples, config.oracle_refine, config.seed)
            if not lifted_oracle.is_positive:
                try:
                    report.lifted_witness = witness_search(lifted, f, lifted_cfg, lifted_oracle)
                except NotFound as exc:
                    report.notes.append(f"lifted witness search: {exc}")

    if report.base_witness is not None:
        report.classification = "NonPositive"
    elif not report.trace_monotone.monotone:
        report.classification = "TraceIncreasing"
    elif report.base_contraction.violated:
        report.classification = "NonPositive"
        report.notes.append("sampled expansion without a boundary witness")
    elif report.lifted_witness is not None or (
        report.lifted_contraction is not None and report.lifted_contraction.violated
    ):
        report.classification = "PTP-not-CP"
    else:
        report.classification = "CPTP"
    return report


# -- contrast functions ----------------------------------------------------------------------


@dataclass
class ContrastWitness:
    rho: np.ndarray = field(repr=False)
    sigma: np.ndarray = field(repr=False)
    g: str
    h_in: float
    h_out: float
    eta: float | None = None
    eps: float | None = None
    trace: list = field(default_factory=list, repr=False)

    def replay(self, phi: LinearMap) -> tuple[float, float]:
        return (geometry.contrast_eval(self.rho, self.sigma, self.g),
                geometry.contrast_eval(phi(self.rho), phi(self.sigma), self.g))

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "h_in": self.h_in,
            "h_out": self.h_out,
            "eta": self.eta,
            "eps": self.eps,
            "rho": matcore.matrix_to_json(self.rho),
            "sigma": matcore.matrix_to_json(self.sigma),
            "trace": [[float(x) for x in row] for row in self.trace],
        }


@dataclass
class ContrastResult:
    violated: bool
    n_effective: int
    n_skipped: int
    max_ratio: float
    witness: ContrastWitness | None = None

    def to_json(self) -> dict:
        return {
            "violated": self.violated,
            "n_effective": self.n_effective,
            "n_skipped": self.n_skipped,
            "max_ratio": self.max_ratio,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def contrast_contraction_test(phi: LinearMap, g="neglog", config: CertConfig | None = None) -> ContrastResult:
    """Sample state pairs and check ``H_g(Phi(rho)||Phi(sigma)) <= H_g(rho||sigma)``."""
    config = config or CertConfig()
    g = get_generator(g)
    n_eff = n_skip = 0
    max_ratio = -np.inf
    for i in range(config.n_samples):
        rng = _sample_rng(config.seed + 3, i)
        rho = matcore.random_density(phi.dim, rng)
        sigma = matcore.random_density(phi.dim, rng)
        try:
            h_in = geometry.contrast_eval(rho, sigma, g)
            h_out = geometry.contrast_eval(matcore.hermitian(phi(rho)), matcore.hermitian(phi(sigma)), g)
        except SingularBasepoint:
            n_skip += 1
            continue
        n_eff += 1
        if h_in > 0:
            max_ratio = max(max_ratio, h_out / h_in)
        if h_out > h_in * (1 + config.ratio_tol) + 1e-12:
            w = ContrastWitness(rho, sigma, g.name, h_in, h_out)
            return ContrastResult(True, n_eff, n_skip, float(max_ratio), w)
    if config.n_samples and n_eff == 0:
        raise Condition1Violated(f"none of {config.n_samples} sampled pairs has interior images")
    return ContrastResult(False, n_eff, n_skip, float(max_ratio), None)


def contrast_witness(phi: LinearMap, g="neglog", config: CertConfig | None = None,
                     oracle: OracleVerdict | None = None) -> ContrastWitness:
    """Divergence-increase witness ``(rho_eta, rho_eta + eps drho_eta)``.

    ``eps`` is held fixed over the schedule (default: 5% of the smallest eta),
    so the image divergence grows like ``eps^2 / eta``. The trace holds
    ``(eta, h_in, h_out)`` per level; the returned witness has the largest
    ``h_out / h_in``.
    """
    config = config or CertConfig()
    g = get_generator(g)
    etas = config.eta0 * 2.0 ** -np.arange(config.contrast_levels + 1)
    eps = config.contrast_eps if config.contrast_eps is not None else 0.05 * etas[-1]
    path = boundary_path(phi, config, oracle)
    best = None
    trace = []
    for pt in _approach(phi, path, etas, config.mode):
        sigma = pt.rho + eps * pt.drho
        try:
            h_in = geometry.contrast_eval(pt.rho, sigma, g)
            h_out = geometry.contrast_eval(matcore.hermitian(phi(pt.rho)), matcore.hermitian(phi(sigma)), g)
        except SingularBasepoint:
            continue
        trace.append((pt.eta, h_in, h_out))
        if h_out > h_in * (1 + config.ratio_tol) and (best is None or h_out / h_in > best.h_out / best.h_in):
            best = ContrastWitness(pt.rho, sigma, g.name, h_in, h_out, pt.eta, eps)
    if best is None:
        raise NotFound("no level of the eta schedule increased the contrast function")
    best.trace = trace
    return best


# -- classical layer ----------------------------------------------------------------------


@dataclass
class ClassicalWitness:
    p: np.ndarray
    dq: np.ndarray
    ratio: float
    eta: float
    eta_trace: list = field(default_factory=list, repr=False)

    def replay(self, t) -> float:
        m = t.matrix if isinstance(t, StochasticMap) else np.asarray(t, dtype=float)
        return (geometry.classical_fisher(m @ self.p, m @ self.dq, check_tangent=False)
                / geometry.classical_fisher(self.p, self.dq))

    def to_json(self) -> dict:
        return {"p": self.p.tolist(), "dq": self.dq.tolist(), "ratio": self.ratio, "eta": self.eta,
                "eta_trace": [[float(e), float(r)] for e, r in self.eta_trace]}


@dataclass
class ClassicalResult:
    contracts: bool
    is_stochastic: bool
    max_fisher_ratio: float
    max_entropy_ratio: float
    n_effective: int
    witness: ClassicalWitness | None = None

    def to_json(self) -> dict:
        return {
            "contracts": self.contracts,
            "is_stochastic": self.is_stochastic,
            "max_fisher_ratio": self.max_fisher_ratio,
            "max_entropy_ratio": self.max_entropy_ratio,
            "n_effective": self.n_effective,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def _classical_witness(m: np.ndarray, config: CertConfig) -> ClassicalWitness:
    """Simplex analogue of the boundary approach; ``m`` has a negative entry."""
    n = m.shape[0]
    pi = np.full(n, 1.0 / n)
    if not np.min(m @ pi) > 0:
        rng = _sample_rng(config.seed + 4, 0)
        for _ in range(max(config.n_samples, 100)):
            pi = rng.dirichlet(np.ones(n))
            if np.min(m @ pi) > 0:
                break
        else:
            raise Condition1Violated("no sampled interior distribution has a positive image")
    j = int(np.argmin(m.min(axis=0)))
    vertex = np.eye(n)[j]
    t = 1e-3
    while np.min(m @ ((1 - t) * vertex + t * pi)) >= 0:
        t /= 2
        if t < 1e-12:
            raise NotFound("cannot pull the negative vertex into the interior")
    sigma = (1 - t) * vertex + t * pi

    def h(lam):
        return float(np.min(m @ ((1 - lam) * pi + lam * sigma)))

    lo, hi = _bisect(h, 0.0, 1.0, 0.0, config.bisection_tol)
    lam_star = 0.5 * (lo + hi)
    h0 = h(0.0)
    best, trace = None, []
    for eta in config.eta_schedule:
        if eta >= h0:
            continue
        a, b = 0.0, lam_star
        for _ in range(200):
            mid = 0.5 * (a + b)
            val = h(mid)
            if abs(val - eta) <= 1e-6 * eta or b - a <= 1e-16:
                break
            a, b = (mid, b) if val > eta else (a, mid)
        p = (1 - mid) * pi + mid * sigma
        i = int(np.argmin(m @ p))
        dq = m[i] - m[i].mean()
        norm = np.linalg.norm(dq)
        if norm < 1e-12:
            raise DegenerateAdjoint("row of the negative output is constant")
        dq = dq / norm
        r = (geometry.classical_fisher(m @ p, m @ dq, check_tangent=False)
             / geometry.classical_fisher(p, dq))
        trace.append((float(eta), r))
        if r > 1 + config.ratio_tol and (best is None or r > best.ratio):
            best = ClassicalWitness(p, dq, r, float(eta))
    if best is None:
        raise NotFound("no level of the eta schedule expanded the Fisher-Rao metric")
    best.eta_trace = trace
    return best


def classical_contraction_test(t, config: CertConfig | None = None) -> ClassicalResult:
    """Fisher-Rao and relative-entropy contraction of a real square matrix on the simplex."""
    config = config or CertConfig()
    sm = t if isinstance(t, StochasticMap) else StochasticMap(np.asarray(t, dtype=float))
    m = sm.matrix
    n = sm.dim
    max_f = max_d = -np.inf
    n_eff = 0
    violated = False
    for i in range(config.n_samples):
        rng = _sample_rng(config.seed + 5, i)
        p, q = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        dq = q - p
        tp, tq = m @ p, m @ q
        if not (np.min(tp) > 1e-12 and np.min(tq) > 1e-12):
            continue
        n_eff += 1
        rf = geometry.classical_fisher(tp, m @ dq, check_tangent=False) / geometry.classical_fisher(p, dq)
        rd = geometry.relative_entropy(tp, tq) / geometry.relative_entropy(p, q)
        max_f, max_d = max(max_f, rf), max(max_d, rd)
        if rf > 1 + config.ratio_tol or rd > 1 + config.ratio_tol:
            violated = True
    witness = None
    if np.min(m) < -1e-12:
        try:
            witness = _classical_witness(m, config)
        except NotFound:
            pass
    return ClassicalResult(not violated and witness is None, sm.is_stochastic,
                           float(max_f), float(max_d), n_eff, witness)
