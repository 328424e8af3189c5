"""Linear maps on d x d matrices: representations, checks, oracles, catalog.

Conventions (fixed, used everywhere):

* transfer matrix ``T``: ``vec(Phi(X)) = T vec(X)`` with column stacking;
* Choi matrix ``C = sum_ij E_ij kron Phi(E_ij)`` (input factor first), so
  block ``(i, j)`` of ``C`` is ``Phi(E_ij)``;
* Kraus form ``Phi(X) = sum_k s_k K_k X K_k^dagger`` with signs ``s_k = +-1``;
  signs are all +1 exactly for completely positive maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence
from urllib.parse import parse_qsl

import numpy as np

from . import matcore

CHOI_RANK_CUTOFF = 1e-12


def _reshuffle(m: np.ndarray, d: int) -> np.ndarray:
    # C[(i,a),(j,b)] = T[(b,a),(j,i)] with row-major tuple indexing; an involution.
    return m.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def transfer_to_choi(t: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(t.shape[0])))
    return _reshuffle(np.asarray(t, dtype=complex), d)


def choi_to_transfer(c: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(c.shape[0])))
    return _reshuffle(np.asarray(c, dtype=complex), d)


def kraus_to_transfer(kraus: Sequence[np.ndarray], signs: Sequence[float] | None = None) -> np.ndarray:
    signs = np.ones(len(kraus)) if signs is None else signs
    return sum(s * np.kron(k.conj(), k) for s, k in zip(signs, kraus))


def choi_to_kraus(c: np.ndarray, cutoff: float = CHOI_RANK_CUTOFF):
    """Signed Kraus operators from the spectral decomposition of a Hermitian Choi matrix.

    Eigen-components with ``|lambda| <= cutoff`` are dropped.
    """
    d = int(round(np.sqrt(c.shape[0])))
    w, v = matcore.eig_hermitian(c)
    kraus, signs = [], []
    for lam, vec in zip(w, v.T):
        if abs(lam) <= cutoff:
            continue
        kraus.append(np.sqrt(abs(lam)) * vec.reshape(d, d).T)
        signs.append(1.0 if lam > 0 else -1.0)
    return kraus, signs


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear map ``M_d -> M_d`` stored in the representation it was given in.

    Build with :meth:`from_kraus`, :meth:`from_transfer` or :meth:`from_choi`.
    ``transfer`` is always populated and is the canonical numeric form.
    """

    dim: int
    repr: str
    transfer: np.ndarray = field(repr=False)
    kraus: tuple = field(default=(), repr=False)
    signs: tuple = field(default=(), repr=False)
    name: str = ""

    @classmethod
    def from_kraus(cls, kraus, signs=None, name: str = "") -> "LinearMap":
        kraus = tuple(np.asarray(k, dtype=complex) for k in kraus)
        if not kraus:
            raise ValueError("need at least one Kraus operator")
        d = kraus[0].shape[0]
        if any(k.shape != (d, d) for k in kraus):
            raise ValueError("Kraus operators must all be square and of equal size")
        signs = tuple(1.0 for _ in kraus) if signs is None else tuple(float(s) for s in signs)
        if len(signs) != len(kraus):
            raise ValueError("one sign per Kraus operator")
        return cls(d, "kraus", kraus_to_transfer(kraus, signs), kraus, signs, name)

    @classmethod
    def from_transfer(cls, t, name: str = "") -> "LinearMap":
        t = np.asarray(t, dtype=complex)
        d = int(round(np.sqrt(t.shape[0])))
        if t.ndim != 2 or t.shape != (d * d, d * d):
            raise ValueError(f"transfer matrix must be d^2 x d^2, got {t.shape}")
        return cls(d, "transfer", t, name=name)

    @classmethod
    def from_choi(cls, c, name: str = "") -> "LinearMap":
        c = np.asarray(c, dtype=complex)
        d = int(round(np.sqrt(c.shape[0])))
        if c.ndim != 2 or c.shape != (d * d, d * d):
            raise ValueError(f"Choi matrix must be d^2 x d^2, got {c.shape}")
        return cls(d, "choi", choi_to_transfer(c), name=name)

    @property
    def choi(self) -> np.ndarray:
        return transfer_to_choi(self.transfer)

    def kraus_form(self):
        """``(kraus, signs)``; derived from the Choi matrix unless given."""
        if self.kraus:
            return list(self.kraus), list(self.signs)
        return choi_to_kraus(matcore.hermitian(self.choi))

    def __call__(self, x) -> np.ndarray:
        return apply(self, x)

    def adjoint(self, y) -> np.ndarray:
        """Hilbert-Schmidt adjoint ``Phi^dagger(Y)``."""
        y = np.asarray(y, dtype=complex)
        if self.kraus:
            return sum(s * k.conj().T @ y @ k for s, k in zip(self.signs, self.kraus))
        return matcore.unvec(self.transfer.conj().T @ matcore.vec(y))

    def adjoint_map(self) -> "LinearMap":
        return LinearMap.from_transfer(self.transfer.conj().T, name=f"adjoint({self.name})")

    def scaled(self, c: float) -> "LinearMap":
        return LinearMap.from_transfer(c * self.transfer, name=f"{c:g}*{self.name}")

    def to_json(self) -> dict:
        if self.repr == "kraus":
            data = [matcore.matrix_to_json(k) for k in self.kraus]
            out = {"dim": self.dim, "repr": "kraus", "data": data}
            if any(s < 0 for s in self.signs):
                out["signs"] = list(self.signs)
            return out
        if self.repr == "choi":
            return {"dim": self.dim, "repr": "choi", "data": matcore.matrix_to_json(self.choi)}
        return {"dim": self.dim, "repr": "transfer", "data": matcore.matrix_to_json(self.transfer)}


def apply(phi: LinearMap, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (phi.dim, phi.dim):
        raise ValueError(f"map acts on {phi.dim}x{phi.dim} matrices, got {x.shape}")
    if phi.kraus:
        return sum(s * k @ x @ k.conj().T for s, k in zip(phi.signs, phi.kraus))
    return matcore.unvec(phi.transfer @ matcore.vec(x))


def choi(phi: LinearMap) -> np.ndarray:
    return phi.choi


def tensor_identity(phi: LinearMap, d_anc: int) -> LinearMap:
    """``Phi kron id`` on ``M_d kron M_{d_anc}`` (system factor first)."""
    if d_anc == 1:
        return phi
    kraus, signs = phi.kraus_form()
    eye = np.eye(d_anc)
    return LinearMap.from_kraus(
        [np.kron(k, eye) for k in kraus], signs, name=f"({phi.name or 'phi'})x id{d_anc}"
    )


def partial_trace_output(c: np.ndarray, d: int) -> np.ndarray:
    """``Tr_out`` of a Choi matrix: ``sum_ij E_ij Tr Phi(E_ij)``."""
    return np.einsum("iaja->ij", c.reshape(d, d, d, d))


def tp_residual(phi: LinearMap) -> float:
    if phi.kraus:
        s = sum(sg * k.conj().T @ k for sg, k in zip(phi.signs, phi.kraus))
    else:
        s = partial_trace_output(phi.choi, phi.dim)
    return float(np.linalg.norm(s - np.eye(phi.dim)))


def is_tp(phi: LinearMap, tol: float = 1e-10) -> tuple[bool, float]:
    r = tp_residual(phi)
    return r < tol, r


def is_hermitian_preserving(phi: LinearMap, tol: float = 1e-10) -> bool:
    return matcore.hermiticity_residual(phi.choi) < tol


def trace_scaling_bound(phi: LinearMap) -> float:
    """``max_rho Tr Phi(rho) / Tr rho`` over PSD rho, i.e. ``lambda_max(Phi^dagger(I))``."""
    return float(np.linalg.eigvalsh(matcore.hermitian(phi.adjoint(np.eye(phi.dim))))[-1])


# -- ground-truth oracles ---------------------------------------------------------


@dataclass
class OracleVerdict:
    is_cp: bool
    is_positive: bool
    is_tp: bool
    is_hp: bool
    min_choi_eigenvalue: float
    tp_residual: float
    trace_bound: float
    min_pure_eigenvalue: float | None = None
    worst_state: np.ndarray | None = field(default=None, repr=False)
    n_samples: int = 0

    @property
    def is_trace_nonincreasing(self) -> bool:
        return self.trace_bound <= 1 + 1e-10

    def to_json(self) -> dict:
        return {
            "is_cp": self.is_cp,
            "is_positive": self.is_positive,
            "is_tp": self.is_tp,
            "is_hp": self.is_hp,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "tp_residual": self.tp_residual,
            "trace_bound": self.trace_bound,
            "min_pure_eigenvalue": self.min_pure_eigenvalue,
            "worst_state": None if self.worst_state is None else [[float(z.real), float(z.imag)] for z in self.worst_state],
            "n_samples": self.n_samples,
        }


def _structural(phi: LinearMap) -> dict:
    c = phi.choi
    hp = matcore.hermiticity_residual(c) < 1e-10
    min_choi = float(np.linalg.eigvalsh(matcore.hermitian(c))[0])
    tol = matcore.TOL_PSD * max(1.0, abs(np.trace(c).real))
    tp_ok, tp_res = is_tp(phi)
    return dict(
        is_cp=bool(hp and min_choi >= -tol),
        is_tp=tp_ok,
        is_hp=hp,
        min_choi_eigenvalue=min_choi,
        tp_residual=tp_res,
        trace_bound=trace_scaling_bound(phi),
    )


def cp_oracle(phi: LinearMap) -> OracleVerdict:
    """CP iff the Choi matrix is PSD; positivity is inferred only when CP."""
    s = _structural(phi)
    if s["is_cp"]:
        return OracleVerdict(is_positive=True, **s)
    return positivity_oracle(phi)


def _bottom(h: np.ndarray) -> tuple[float, np.ndarray]:
    w, v = np.linalg.eigh(matcore.hermitian(h))
    return float(w[0]), v[:, 0]


def min_pure_eigenvalue(phi: LinearMap, psi0: np.ndarray, n_refine: int = 50, tol: float = 1e-13):
    """Alternating minimization of ``<v| Phi(|psi><psi|) |v>`` from ``psi0``.

    Each half-step takes the bottom eigenvector of ``Phi(psi psi^dagger)`` or of
    ``Phi^dagger(v v^dagger)``, so the objective never increases.
    """
    psi = psi0 / np.linalg.norm(psi0)
    val, v = _bottom(apply(phi, np.outer(psi, psi.conj())))
    for _ in range(n_refine):
        _, psi = _bottom(phi.adjoint(np.outer(v, v.conj())))
        new, v = _bottom(apply(phi, np.outer(psi, psi.conj())))
        done = val - new <= tol
        val = min(val, new)
        if done:
            break
    return val, psi


def positivity_oracle(phi: LinearMap, n_grid: int = 2000, n_refine: int = 50, seed=0, n_starts: int = 8) -> OracleVerdict:
    """Estimate ``min_psi lambda_min(Phi(|psi><psi|))`` over pure states.

    Samples ``n_grid`` Haar pure states (seeded per sample), then refines the
    ``n_starts`` best of them by alternating minimization.
    """
    if not is_hermitian_preserving(phi):
        raise ValueError("positivity oracle needs a Hermitian-preserving map")
    d = phi.dim
    root = np.random.SeedSequence(seed)
    children = root.spawn(n_grid)
    scores = np.empty(n_grid)
    states = np.empty((n_grid, d), dtype=complex)
    for i, child in enumerate(children):
        psi = matcore.random_pure(d, np.random.default_rng(child))
        states[i] = psi
        scores[i] = np.linalg.eigvalsh(matcore.hermitian(apply(phi, np.outer(psi, psi.conj()))))[0]
    best_val, best_psi = np.inf, None
    for i in np.argsort(scores)[: max(1, n_starts)]:
        val, psi = min_pure_eigenvalue(phi, states[i], n_refine)
        if val < best_val:
            best_val, best_psi = val, psi
    s = _structural(phi)
    tol = matcore.TOL_PSD * max(1.0, abs(np.trace(phi.choi).real))
    return OracleVerdict(
        is_positive=bool(best_val >= -tol or s["is_cp"]),
        min_pure_eigenvalue=best_val,
        worst_state=best_psi,
        n_samples=n_grid,
        **s,
    )


# -- classical stochastic maps ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class StochasticMap:
    """Real ``n x n`` matrix acting on probability column vectors."""

    matrix: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"stochastic map must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_stochastic(self) -> bool:
        m = self.matrix
        return bool(np.all(m >= -1e-12) and np.all(np.abs(m.sum(axis=0) - 1) <= 1e-12))

    def __call__(self, p) -> np.ndarray:
        return stochastic_apply(self, p)

    def to_json(self) -> dict:
        return {"dim": self.dim, "repr": "stochastic", "data": self.matrix.tolist()}


def stochastic_apply(t, p) -> np.ndarray:
    m = t.matrix if isinstance(t, StochasticMap) else np.asarray(t, dtype=float)
    return m @ np.asarray(p, dtype=float)


# -- catalog ------------------------------------------------------------------------


def identity(d: int = 2) -> LinearMap:
    return LinearMap.from_kraus([np.eye(d)], name="identity")


def unitary(u) -> LinearMap:
    return LinearMap.from_kraus([np.asarray(u, dtype=complex)], name="unitary")


def transpose(d: int = 2) -> LinearMap:
    t = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            # vec index of E_ij is j*d + i; transpose sends it to E_ji
            t[i * d + j, j * d + i] = 1.0
    return LinearMap.from_transfer(t, name="transpose")


def depolarizing(p: float, d: int = 2) -> LinearMap:
    """``X -> p X + (1 - p) Tr(X) I / d``; CP iff -1/(d^2-1) <= p <= 1."""
    eye = matcore.vec(np.eye(d))
    t = p * np.eye(d * d) + (1 - p) / d * np.outer(eye, eye)
    return LinearMap.from_transfer(t, name=f"depolarizing(p={p:g})")


def dephasing(lam: float, d: int = 2) -> LinearMap:
    """Off-diagonal entries multiplied by ``1 - lam``; CP iff 0 <= lam <= 2."""
    scale = np.full((d, d), 1.0 - lam)
    np.fill_diagonal(scale, 1.0)
    return LinearMap.from_transfer(np.diag(matcore.vec(scale)), name=f"dephasing(lam={lam:g})")


def amplitude_damping(gamma: float) -> LinearMap:
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return LinearMap.from_kraus([k0, k1], name=f"amplitude_damping(gamma={gamma:g})")


def scalar(c: float, d: int = 2) -> LinearMap:
    return LinearMap.from_transfer(c * np.eye(d * d), name=f"scalar(c={c:g})")


def random_cptp(d: int = 2, k: int | None = None, seed=None) -> LinearMap:
    """Kraus operators cut from a Haar isometry ``C^d -> C^d kron C^k``."""
    k = d if k is None else k
    u = matcore.random_unitary(d * k, seed)
    iso = u[:, :d]
    kraus = [iso[i * d:(i + 1) * d, :] for i in range(k)]
    return LinearMap.from_kraus(kraus, name=f"random_cptp(d={d},k={k},seed={seed})")


def mixture(maps: Sequence[LinearMap], weights: Sequence[float]) -> LinearMap:
    """Real linear combination ``sum_i w_i Phi_i`` (convex when weights are)."""
    if len(maps) != len(weights) or not maps:
        raise ValueError("need matching non-empty maps and weights")
    t = sum(w * m.transfer for w, m in zip(weights, maps))
    return LinearMap.from_transfer(t, name="mixture")


def random_stochastic(n: int = 3, seed=None) -> StochasticMap:
    rng = np.random.default_rng(seed)
    return StochasticMap(rng.dirichlet(np.ones(n), size=n).T, name="random_stochastic")


def permutation(perm: Sequence[int]) -> StochasticMap:
    n = len(perm)
    m = np.zeros((n, n))
    m[list(perm), range(n)] = 1.0
    return StochasticMap(m, name="permutation")


def perturbed_stochastic(n: int = 3, seed=None, delta: float = -0.1) -> StochasticMap:
    """Column-sum-preserving matrix with one entry equal to ``delta`` (negative)."""
    rng = np.random.default_rng(seed)
    m = rng.dirichlet(np.ones(n), size=n).T
    j = int(rng.integers(n))
    i, k = rng.choice(n, size=2, replace=False)
    m[k, j] += m[i, j] - delta
    m[i, j] = delta
    return StochasticMap(m, name=f"perturbed_stochastic(delta={delta:g})")


def uniform_mixer(n: int = 3) -> StochasticMap:
    return StochasticMap(np.full((n, n), 1.0 / n), name="uniform_mixer")


CATALOG = {
    "identity": lambda d=2: identity(int(d)),
    "transpose": lambda d=2: transpose(int(d)),
    "depolarizing": lambda p, d=2: depolarizing(float(p), int(d)),
    "dephasing": lambda lam, d=2: dephasing(float(lam), int(d)),
    "amplitude_damping": lambda gamma: amplitude_damping(float(gamma)),
    "scalar": lambda c, d=2: scalar(float(c), int(d)),
    "random_cptp": lambda d=2, k=None, seed=0: random_cptp(int(d), None if k is None else int(k), int(seed)),
    "random_unitary": lambda d=2, seed=0: unitary(matcore.random_unitary(int(d), int(seed))),
    "random_stochastic": lambda n=3, seed=0: random_stochastic(int(n), int(seed)),
    "perturbed_stochastic": lambda n=3, seed=0, delta=-0.1: perturbed_stochastic(int(n), int(seed), float(delta)),
    "uniform_mixer": lambda n=3: uniform_mixer(int(n)),
    "permutation": lambda perm: permutation([int(c) for c in str(perm).split(",")]),
}


def catalog(name: str, **params):
    """Build a named catalog map, e.g. ``catalog("depolarizing", p=1.5)``."""
    if name not in CATALOG:
        raise ValueError(f"unknown catalog map {name!r}; valid: {sorted(CATALOG)}")
    try:
        m = CATALOG[name](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for catalog map {name!r}: {exc}") from None
    return m


def parse_catalog_spec(spec: str):
    """``"catalog:depolarizing?p=1.5&d=3"`` -> catalog map."""
    body = spec[len("catalog:"):] if spec.startswith("catalog:") else spec
    name, _, query = body.partition("?")
    return catalog(name, **dict(parse_qsl(query)))


def map_from_json(doc: dict):
    """Validate and decode a map document ``{"dim", "repr", "data"}``."""
    if not isinstance(doc, dict):
        raise ValueError("/: map document must be a JSON object")
    for key in ("dim", "repr", "data"):
        if key not in doc:
            raise ValueError(f"/{key}: missing required field")
    d, rep, data = doc["dim"], doc["repr"], doc["data"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ValueError(f"/dim: expected a positive integer, got {d!r}")
    if rep == "stochastic":
        m = np.asarray(data, dtype=float)
        if m.shape != (d, d):
            raise ValueError(f"/data: expected {d}x{d} real matrix, got shape {m.shape}")
        return StochasticMap(m)
    if rep == "kraus":
        if not isinstance(data, list) or not data:
            raise ValueError("/data: expected a non-empty list of Kraus matrices")
        kraus = [matcore.matrix_from_json(k, f"/data/{i}") for i, k in enumerate(data)]
        for i, k in enumerate(kraus):
            if k.shape != (d, d):
                raise ValueError(f"/data/{i}: expected {d}x{d} matrix, got {k.shape}")
        signs = doc.get("signs")
        if signs is not None and (len(signs) != len(kraus) or any(s not in (1, -1, 1.0, -1.0) for s in signs)):
            raise ValueError("/signs: expected one +1/-1 per Kraus operator")
        return LinearMap.from_kraus(kraus, signs)
    if rep in ("transfer", "choi"):
        m = matcore.matrix_from_json(data, "/data")
        if m.shape != (d * d, d * d):
            raise ValueError(f"/data: expected {d * d}x{d * d} matrix, got {m.shape}")
        if rep == "choi":
            if matcore.hermiticity_residual(m) >= 1e-10:
                raise ValueError("/data: Choi matrix is not Hermitian (map is not Hermitian-preserving)")
            return LinearMap.from_choi(m)
        return LinearMap.from_transfer(m)
    raise ValueError(f"/repr: expected one of kraus, transfer, choi, stochastic; got {rep!r}")


def load_map(source: str):
    """Load a map from a JSON file path or a ``catalog:`` spec."""
    if source.startswith("catalog:"):
        return parse_catalog_spec(source)
    with open(source) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{source}: invalid JSON: {exc}") from None
    return map_from_json(doc)
