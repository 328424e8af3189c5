"""Hermitian linear algebra substrate.

Matrices are plain complex numpy arrays. Vectorization is column stacking
throughout the package::

    A = [[a, b],
         [c, d]]   ->   vec(A) = (a, c, b, d)

so that ``vec(X A Y) = (Y.T kron X) vec(A)``.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

TOL_PSD = float(os.environ.get("CONTRACTIVITY_TOL_PSD", 1e-10))
TOL_INTERIOR = float(os.environ.get("CONTRACTIVITY_TOL_INTERIOR", 1e-8))


class Spectral(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian(a) -> np.ndarray:
    """Return ``(A + A^dagger) / 2`` as a complex square array."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return (a + a.conj().T) / 2


def hermiticity_residual(a) -> float:
    a = np.asarray(a, dtype=complex)
    return float(np.linalg.norm(a - a.conj().T))


def eig_hermitian(h) -> Spectral:
    """Eigendecomposition of a Hermitian matrix with reproducible phases.

    Eigenvalues come out ascending. Each eigenvector is rotated so that its
    largest-magnitude component (first one on ties) is real and positive.
    """
    h = hermitian(h)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigh did not converge for matrix:\n{np.array2string(h, precision=17)}"
        ) from exc
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    v = v * (np.abs(pivots) / pivots)
    return Spectral(w, v)


def min_eigenvalue(h) -> float:
    return float(np.linalg.eigvalsh(hermitian(h))[0])


def is_psd(h, tol: float | None = None) -> bool:
    h = hermitian(h)
    if tol is None:
        tol = TOL_PSD * max(1.0, abs(np.trace(h).real))
    return min_eigenvalue(h) >= -tol


def interior_threshold(h, tol_interior: float | None = None) -> float:
    h = np.asarray(h)
    tol_interior = TOL_INTERIOR if tol_interior is None else tol_interior
    return tol_interior * abs(np.trace(h).real) / h.shape[0]


def is_interior(h, tol_interior: float | None = None) -> bool:
    """Full-rank test: smallest eigenvalue above ``tol_interior * Tr(h) / d``."""
    h = hermitian(h)
    return min_eigenvalue(h) > interior_threshold(h, tol_interior)


def is_density(h, tol: float = 1e-12) -> bool:
    h = np.asarray(h, dtype=complex)
    return (
        hermiticity_residual(h) <= tol
        and abs(np.trace(h) - 1) <= tol
        and is_psd(h)
    )


# -- vectorization and multiplication superoperators -------------------------


def vec(a) -> np.ndarray:
    return np.asarray(a).T.reshape(-1)


def unvec(v) -> np.ndarray:
    v = np.asarray(v).reshape(-1)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape(d, d).T


def left_mult_superop(rho) -> np.ndarray:
    """Matrix of ``A -> rho @ A`` acting on ``vec(A)``."""
    rho = np.asarray(rho, dtype=complex)
    return np.kron(np.eye(rho.shape[0]), rho)


def right_mult_superop(rho) -> np.ndarray:
    """Matrix of ``A -> A @ rho`` acting on ``vec(A)``."""
    rho = np.asarray(rho, dtype=complex)
    return np.kron(rho.T, np.eye(rho.shape[0]))


# -- seeded samplers -----------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def ginibre(d: int, k: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    return (rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))) / np.sqrt(2)


def random_density(d: int, seed=None, k: int | None = None) -> np.ndarray:
    """Induced-measure density matrix ``G G^dagger / Tr(G G^dagger)``.

    ``k`` is the number of Ginibre columns (default ``d``, Hilbert-Schmidt
    measure). Smaller ``k`` biases towards purer, lower-rank states.
    """
    if d < 1:
        raise ValueError("d must be positive")
    k = d if k is None else k
    g = ginibre(d, k, seed)
    rho = g @ g.conj().T
    return hermitian(rho / np.trace(rho).real)


def random_pure(d: int, seed=None) -> np.ndarray:
    psi = ginibre(d, 1, seed)[:, 0]
    return psi / np.linalg.norm(psi)


def random_tangent(d: int, seed=None, traceless: bool = True) -> np.ndarray:
    """GUE-style Hermitian direction with unit Frobenius norm."""
    g = ginibre(d, d, seed)
    h = hermitian(g)
    if traceless:
        h = h - np.trace(h).real / d * np.eye(d)
    return h / np.linalg.norm(h)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix."""
    q, r = np.linalg.qr(ginibre(d, d, seed))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


# -- JSON encoding: complex = [re, im], matrix = row-major nested lists --------


def matrix_to_json(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(data, path: str = "") -> np.ndarray:
    """Decode a nested ``[[[re, im], ...], ...]`` list; bare real entries are also accepted.

    Raises ``ValueError`` naming the JSON pointer of the first bad element.
    """
    if not isinstance(data, list) or not data:
        raise ValueError(f"{path or '/'}: expected a non-empty list of rows")
    n_cols = None
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list):
            raise ValueError(f"{path}/{i}: expected a list of [re, im] pairs")
        if n_cols is None:
            n_cols = len(row)
        elif len(row) != n_cols:
            raise ValueError(f"{path}/{i}: ragged row (length {len(row)} != {n_cols})")
        vals = []
        for j, z in enumerate(row):
            if isinstance(z, (int, float)) and not isinstance(z, bool):
                vals.append(complex(z))
                continue
            if (
                not isinstance(z, (list, tuple))
                or len(z) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in z)
            ):
                raise ValueError(f"{path}/{i}/{j}: expected a number or [re, im] pair, got {z!r}")
            vals.append(complex(z[0], z[1]))
        out.append(vals)
    return np.array(out, dtype=complex)
