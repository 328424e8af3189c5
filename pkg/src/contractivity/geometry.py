"""Monotone metrics, contrast functions and their classical counterparts.

Quantum quantities are evaluated in eigenbases. With ``pi = V diag(p) V^dagger``
the inverse Fisher operator acts entrywise in that basis::

    J_f^{-1}[A]_ij = A_ij / (p_j f(p_i / p_j))

and the contrast function of a generator ``g`` is the double spectral sum::

    H_g(rho || sigma) = sum_ij |<phi_i|psi_j>|^2 r_j g(s_i / r_j)

for ``rho = sum r_j |psi_j><psi_j|`` and ``sigma = sum s_i |phi_i><phi_i|``.
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .monotone import get_generator, get_monotone, monotone_from_g


class SingularBasepoint(ValueError):
    """Basepoint on (or numerically at) the boundary of the positive cone."""

    def __init__(self, min_eigenvalue: float, threshold: float):
        self.min_eigenvalue = float(min_eigenvalue)
        self.threshold = float(threshold)
        super().__init__(
            f"basepoint is not interior: min eigenvalue {self.min_eigenvalue:.3e} "
            f"<= threshold {self.threshold:.3e}"
        )


def _interior_spectrum(pi, tol_interior=None) -> matcore.Spectral:
    spec = matcore.eig_hermitian(pi)
    thr = matcore.interior_threshold(pi, tol_interior)
    if not spec.eigenvalues[0] > thr:
        raise SingularBasepoint(spec.eigenvalues[0], thr)
    return spec


def _fisher_denominators(p: np.ndarray, f) -> np.ndarray:
    """``c_ij = p_j f(p_i / p_j)``; symmetric because f(x) = x f(1/x)."""
    ratios = p[:, None] / p[None, :]
    return p[None, :] * f(ratios)


def fisher_inverse_apply(pi, a, f="sld", tol_interior=None) -> np.ndarray:
    f = get_monotone(f)
    p, v = _interior_spectrum(pi, tol_interior)
    a_eig = v.conj().T @ np.asarray(a, dtype=complex) @ v
    return v @ (a_eig / _fisher_denominators(p, f)) @ v.conj().T


def fisher_apply(pi, a, f="sld", tol_interior=None) -> np.ndarray:
    """Forward Fisher operator ``R_pi f(L_pi R_pi^{-1})`` applied to ``a``."""
    f = get_monotone(f)
    p, v = _interior_spectrum(pi, tol_interior)
    a_eig = v.conj().T @ np.asarray(a, dtype=complex) @ v
    return v @ (a_eig * _fisher_denominators(p, f)) @ v.conj().T


def fisher_metric(pi, a, b=None, f="sld", tol_interior=None) -> float:
    """``K_{f,pi}(A, B) = Tr(A J_f^{-1}|_pi[B])`` for Hermitian ``A``, ``B``.

    ``b`` defaults to ``a`` (the squared length of ``a``).
    """
    f = get_monotone(f)
    p, v = _interior_spectrum(pi, tol_interior)
    vh = v.conj().T
    a_eig = vh @ np.asarray(a, dtype=complex) @ v
    b_eig = a_eig if b is None else vh @ np.asarray(b, dtype=complex) @ v
    return float(np.sum(a_eig.conj() * b_eig / _fisher_denominators(p, f)).real)


def fisher_metric_coordinates(pi, a, f="sld", tol_interior=None) -> tuple[float, float]:
    """Split ``K_{f,pi}(A, A)`` into off-diagonal and diagonal eigenbasis sums.

    The diagonal part is ``sum_i |A_ii|^2 / p_i``, independent of f.
    """
    f = get_monotone(f)
    p, v = _interior_spectrum(pi, tol_interior)
    a_eig = v.conj().T @ np.asarray(a, dtype=complex) @ v
    terms = np.abs(a_eig) ** 2 / _fisher_denominators(p, f)
    diag = float(np.trace(terms).real)
    return float(terms.sum().real) - diag, diag


def contrast_eval(rho, sigma, g="neglog", tol_interior=None) -> float:
    """Petz quasi-entropy ``H_g(rho || sigma) = Tr g(L_sigma R_rho^{-1})[rho]``."""
    g = get_generator(g)
    r, psi = _interior_spectrum(rho, tol_interior)
    s, phi = _interior_spectrum(sigma, tol_interior)
    overlaps = np.abs(phi.conj().T @ psi) ** 2
    ratios = s[:, None] / r[None, :]
    return float(np.sum(overlaps * g(ratios) * r[None, :]))


def local_expansion_residual(pi, a, b, g="neglog", eps=1e-2, tol_interior=None) -> float:
    """``|H_g(pi + eps A || pi + eps B) - (eps^2 / 2) K(A - B, A - B)|``.

    The metric uses the monotone function attached to ``g``; the factor
    ``g''(1)`` undoes the f(1) = 1 normalization so arbitrary rescalings of g
    are handled.
    """
    g = get_generator(g)
    pi = np.asarray(pi, dtype=complex)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rho = pi + eps * a
    sigma = pi + eps * b
    for m in (rho, sigma):
        if not matcore.is_interior(m, tol_interior):
            raise ValueError(f"eps = {eps} takes the perturbed state out of the interior")
    h = contrast_eval(rho, sigma, g, tol_interior)
    k = fisher_metric(pi, a - b, f=monotone_from_g(g), tol_interior=tol_interior)
    return abs(h - 0.5 * eps**2 * g.second_derivative_at_one() * k)


# -- classical layer -------------------------------------------------------------


def classical_fisher(p, dq, check_tangent: bool = True) -> float:
    """Fisher-Rao squared length ``sum_i dq_i^2 / p_i``."""
    p = np.asarray(p, dtype=float)
    dq = np.asarray(dq, dtype=float)
    if np.any(p <= 0):
        raise ValueError("classical Fisher metric needs p_i > 0")
    if check_tangent and abs(dq.sum()) > 1e-10 * max(1.0, np.abs(dq).sum()):
        raise ValueError(f"tangent vector must sum to zero, got {dq.sum():.3e}")
    return float(np.sum(dq**2 / p))


def relative_entropy(p, q) -> float:
    """Kullback-Leibler divergence with the 0 log 0 = 0 convention."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    support = p > 0
    if np.any(q[support] <= 0):
        raise ValueError("relative entropy needs q_i > 0 wherever p_i > 0")
    return float(np.sum(p[support] * np.log(p[support] / q[support])))
