"""Coupled Painleve VI hierarchy: linear systems, hypergeometric particular
solutions, confluences, Weyl symmetries, and verification tooling."""

from .params import ParameterSet, partial_sum, sample_generic, sample_degenerate, degenerate_replace
from .hyperfn import HGSpec, pochhammer, eval_series, ode_residual, riemann_scheme

__all__ = [
    "ParameterSet",
    "partial_sum",
    "sample_generic",
    "sample_degenerate",
    "degenerate_replace",
    "HGSpec",
    "pochhammer",
    "eval_series",
    "ode_residual",
    "riemann_scheme",
]
