"""Operator monotone functions ``f`` and contrast generators ``g``.

Every monotone function is normalized to ``f(1) = 1`` and is symmetric,
``f(x) = x f(1/x)``. Every generator satisfies ``g(1) = 0``; the catalog
generators additionally have ``g''(1) = 1``, which makes the ``g -> f``
correspondence ``f(x) = (x - 1)^2 / (g(x) + x g(1/x))`` land on ``f(1) = 1``
without rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Inside this window removable singularities switch to a Taylor series.
SERIES_RADIUS = 1e-4


def _positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("monotone / generator functions are defined for x > 0 only")
    return x


def _with_series(x: np.ndarray, direct: Callable, coeffs) -> np.ndarray:
    """Evaluate ``direct`` away from 1 and the polynomial in ``x - 1`` near it."""
    u = x - 1.0
    near = np.abs(u) < SERIES_RADIUS
    out = np.empty_like(x)
    if np.any(~near):
        out[~near] = direct(x[~near])
    if np.any(near):
        out[near] = np.polynomial.polynomial.polyval(u[near], coeffs)
    return out


@dataclass(frozen=True)
class ContrastGenerator:
    """Matrix convex ``g`` with ``g(1) = 0``.

    ``derivs`` returns ``g^(n)(1)`` for ``n >= 0``; it feeds the series used by
    :func:`f_from_g` near ``x = 1``.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    derivs: Callable[[int], float] = field(repr=False, compare=False)
    perspective: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __call__(self, x):
        x = _positive(x)
        return self.func(x)

    def dual(self, x):
        """``x g(1/x)``, evaluated without forming ``1/x`` when a closed form is known."""
        x = _positive(x)
        if self.perspective is not None:
            return self.perspective(x)
        return x * self.func(1.0 / x)

    def second_derivative_at_one(self) -> float:
        return float(self.derivs(2))


def _log(x):
    # log1p keeps full relative accuracy for x near 1
    u = x - 1.0
    return np.where(np.abs(u) < 0.5, np.log1p(np.where(np.abs(u) < 0.5, u, 0.0)), np.log(x))


def _neglog_derivs(n: int) -> float:
    return 0.0 if n == 0 else (-1) ** n * math.factorial(n - 1)


def _xlogx_derivs(n: int) -> float:
    if n == 0:
        return 0.0
    if n == 1:
        return 1.0
    return (-1) ** n * math.factorial(n - 2)


def _quadratic_derivs(n: int) -> float:
    return 1.0 if n == 2 else 0.0


def power_generator(alpha: float) -> ContrastGenerator:
    """``g(x) = (1 - x^alpha) / (alpha (1 - alpha))`` for alpha in [-1, 2] minus {0, 1}."""
    alpha = float(alpha)
    if not -1.0 <= alpha <= 2.0 or alpha in (0.0, 1.0):
        raise ValueError(f"power generator needs alpha in [-1, 2] \\ {{0, 1}}, got {alpha}")
    scale = alpha * (1.0 - alpha)

    def derivs(n: int) -> float:
        if n == 0:
            return 0.0
        falling = 1.0
        for k in range(n):
            falling *= alpha - k
        return -falling / scale

    return ContrastGenerator(
        f"power{alpha:g}",
        lambda x: -np.expm1(alpha * _log(x)) / scale,
        derivs,
        lambda x: -x * np.expm1(-alpha * _log(x)) / scale,
    )


GENERATORS: dict[str, ContrastGenerator] = {
    "neglog": ContrastGenerator("neglog", lambda x: -_log(x), _neglog_derivs, lambda x: x * _log(x)),
    "xlogx": ContrastGenerator("xlogx", lambda x: x * _log(x), _xlogx_derivs, lambda x: -_log(x)),
    "quadratic": ContrastGenerator(
        "quadratic", lambda x: 0.5 * (x - 1.0) ** 2, _quadratic_derivs, lambda x: 0.5 * (x - 1.0) ** 2 / x
    ),
}


def get_generator(g) -> ContrastGenerator:
    """Resolve ``g`` from a generator object or a name such as ``"neglog"`` or ``"power0.5"``."""
    if isinstance(g, ContrastGenerator):
        return g
    name = str(g).lower()
    if name in GENERATORS:
        return GENERATORS[name]
    if name.startswith("power"):
        try:
            return power_generator(float(name[len("power"):]))
        except ValueError as exc:
            raise ValueError(f"bad power generator {g!r}: {exc}") from None
    raise ValueError(f"unknown contrast generator {g!r}; valid: {sorted(GENERATORS)} or power<alpha>")


# -- g -> f correspondence -------------------------------------------------------


def _series_of_f_from_g(g: ContrastGenerator, order: int = 4) -> np.ndarray:
    """Taylor coefficients in ``u = x - 1`` of the normalized f built from ``g``."""
    P = np.polynomial.polynomial
    n_terms = order + 3
    a = np.array([g.derivs(n) / math.factorial(n) for n in range(n_terms)])
    # 1/x - 1 = -u + u^2 - u^3 + ...
    v = np.array([0.0] + [(-1.0) ** k for k in range(1, n_terms)])
    comp = np.zeros(n_terms)
    power = np.array([1.0])
    for coeff in a:
        comp = P.polyadd(comp, coeff * power)[:n_terms]
        power = P.polymul(power, v)[:n_terms]
    denom = P.polyadd(a, P.polymul([1.0, 1.0], comp))[:n_terms]
    # denom = u^2 (c2 + c3 u + ...); f = g''(1) / (c2 + c3 u + ...)
    tail = np.zeros(order + 1)
    body = denom[2:]
    tail[: min(len(body), order + 1)] = body[: order + 1]
    if abs(tail[0]) == 0:
        raise ValueError(f"generator {g.name} has g''(1) = 0; no Fisher metric")
    inv = np.zeros(order + 1)
    inv[0] = 1.0 / tail[0]
    for k in range(1, order + 1):
        inv[k] = -sum(tail[j] * inv[k - j] for j in range(1, k + 1)) / tail[0]
    return g.second_derivative_at_one() * inv


def f_from_g(g, x) -> np.ndarray:
    """Monotone function attached to a contrast generator, normalized to f(1) = 1.

    Away from ``x = 1`` this is ``g''(1) (x - 1)^2 / (g(x) + x g(1/x))``; near 1
    a fourth-order series is used.
    """
    g = get_generator(g)
    x = _positive(x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    coeffs = _series_of_f_from_g(g)
    c = g.second_derivative_at_one()

    def direct(t):
        denom = g.func(t) + g.dual(t)
        bad = ~(denom > 1e-300) | ~np.isfinite(denom)
        if np.any(bad):
            raise ValueError(
                f"generator {g.name}: g(x) + x g(1/x) = {denom[bad][0]!r} at x = {t[bad][0]!r}; "
                "g is not strictly convex there"
            )
        return c * (t - 1.0) ** 2 / denom

    out = _with_series(x, direct, coeffs)
    return out[0] if scalar else out


# -- monotone functions ----------------------------------------------------------

_KMB_SERIES = (1.0, 1.0 / 2, -1.0 / 12, 1.0 / 24, -19.0 / 720)


def _sld(x):
    return (1.0 + x) / 2.0


def _kmb(x):
    return _with_series(x, lambda t: (t - 1.0) / _log(t), _KMB_SERIES)


def _wy(x):
    return ((1.0 + np.sqrt(x)) / 2.0) ** 2


def _harmonic(x):
    return 2.0 * x / (1.0 + x)


@dataclass(frozen=True)
class MonotoneFunction:
    """Normalized symmetric operator monotone function, callable on arrays."""

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def __call__(self, x):
        x = _positive(x)
        scalar = x.ndim == 0
        out = self.func(np.atleast_1d(x))
        return float(out[0]) if scalar else out


MONOTONE: dict[str, MonotoneFunction] = {
    "sld": MonotoneFunction("sld", _sld),
    "kmb": MonotoneFunction("kmb", _kmb),
    "wy": MonotoneFunction("wy", _wy),
    "rld": MonotoneFunction("rld", _harmonic),
}
# harmonic mean is the smallest normalized symmetric f; same function as "rld" here
MONOTONE["harmonic"] = MonotoneFunction("harmonic", _harmonic)

CATALOG_F = ("sld", "kmb", "wy", "rld")


def monotone_from_g(g) -> MonotoneFunction:
    g = get_generator(g)
    return MonotoneFunction(f"from_g:{g.name}", lambda x: f_from_g(g, x))


def get_monotone(f) -> MonotoneFunction:
    """Resolve a monotone function by object, catalog name, or ``"from_g:<generator>"``."""
    if isinstance(f, MonotoneFunction):
        return f
    name = str(f).lower()
    if name in MONOTONE:
        return MONOTONE[name]
    if name.startswith("from_g:"):
        return monotone_from_g(name[len("from_g:"):])
    raise ValueError(f"unknown monotone function {f!r}; valid: {sorted(MONOTONE)} or from_g:<g>")


def f_eval(f, x):
    return get_monotone(f)(x)


def log_grid(lo: float = 1e-6, hi: float = 1e6, n: int = 1000) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), n)


def check_symmetry(f, grid=None) -> float:
    """Largest relative residual of ``f(x) - x f(1/x)`` over ``grid``."""
    f = get_monotone(f)
    x = log_grid() if grid is None else np.asarray(grid, dtype=float)
    lhs = f(x)
    rhs = x * f(1.0 / x)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), 1e-300)))


def check_monotone(f, grid=None, tol: float = 1e-12) -> bool:
    f = get_monotone(f)
    x = np.sort(log_grid() if grid is None else np.asarray(grid, dtype=float))
    y = f(x)
    return bool(np.all(np.diff(y) >= -tol * np.maximum(1.0, np.abs(y[1:]))))


def midpoint_convexity_gap(g, grid=None) -> float:
    """Largest violation of ``g((x+y)/2) <= (g(x)+g(y))/2`` over neighbouring grid points."""
    g = get_generator(g)
    x = np.sort(log_grid(1e-3, 1e3) if grid is None else np.asarray(grid, dtype=float))
    a, b = x[:-2], x[2:]
    mid = g((a + b) / 2)
    avg = (g(a) + g(b)) / 2
    return float(np.max(mid - avg))
