"""Monotone quantum Fisher metrics and contraction-based certification of linear maps."""

__version__ = "0.1.0"

from .certifier import (  # noqa: E402
    CertConfig,
    certify,
    contraction_ratio,
    sample_contraction_test,
    witness_search,
)
from .geometry import contrast_eval, fisher_inverse_apply, fisher_metric  # noqa: E402
from .maps import LinearMap, StochasticMap, catalog  # noqa: E402

__all__ = [
    "CertConfig",
    "LinearMap",
    "StochasticMap",
    "catalog",
    "certify",
    "contraction_ratio",
    "contrast_eval",
    "fisher_inverse_apply",
    "fisher_metric",
    "sample_contraction_test",
    "witness_search",
]
