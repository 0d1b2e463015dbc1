"""Generalized and confluent hypergeometric series and their operators.

A series spec holds the upper parameters a_0..a_m, the lower parameters
b_1..b_n and a flag saying whether each term carries the extra factorial
(1)_i in its denominator.  The defining operator in delta = t d/dt is

    delta (delta + b_1 - 1) ... (delta + b_n - 1)  -  t (delta + a_0) ... (delta + a_m),

whose Frobenius recursion forces the factorial: the leading delta factor
contributes the 1/i.  Confluent series (fewer upper than lower
parameters) therefore also need ``includes_factorial=True`` to satisfy
their operator; the flag exists so the bare product form can still be
summed for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_TERMS = 100_000
_CONVERGED_RUN = 3          # consecutive small terms required by the stopping rule
_DENOM_FLOOR = 1e-250


class SeriesError(ValueError):
    """Series undefined or not summable at the requested point."""


def pochhammer(a, i: int):
    """Rising factorial a (a+1) ... (a+i-1); empty product for i = 0.

    Type-preserving: works for complex and Fraction arguments alike.
    """
    if i < 0:
        raise ValueError("pochhammer order must be nonnegative")
    out = a * 0 + 1
    for m in range(i):
        out = out * (a + m)
    return out


@dataclass(frozen=True)
class HGSpec:
    """Upper/lower parameter lists of a hypergeometric series."""

    upper: tuple
    lower: tuple
    includes_factorial: bool = True

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(complex(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(complex(b) for b in self.lower))
        for b in self.lower:
            if b.imag == 0.0 and b.real <= 0.0 and b.real == round(b.real):
                raise SeriesError(f"lower parameter {b} is a nonpositive integer")

    @property
    def growth_exponent(self) -> int:
        """Degree of i in the term ratio: 0 means radius 1, negative entire."""
        return len(self.upper) - len(self.lower) - (1 if self.includes_factorial else 0)

    def term_ratio(self, i: int) -> complex:
        """c_i / c_{i-1} with the t factor left out, for i >= 1."""
        num = 1.0 + 0.0j
        for a in self.upper:
            num *= a + i - 1
        den = 1.0 + 0.0j
        for b in self.lower:
            den *= b + i - 1
        if self.includes_factorial:
            den *= i
        if abs(den) < _DENOM_FLOOR:
            raise SeriesError(f"vanishing denominator in term {i} (lower parameter resonance)")
        return num / den


def _check_domain(spec: HGSpec, t: complex):
    g = spec.growth_exponent
    if g > 0 and t != 0:
        raise SeriesError("series has zero radius of convergence away from t = 0")
    if g == 0 and abs(t) >= 1.0:
        raise SeriesError(f"series diverges for |t| >= 1 (got |t| = {abs(t):.6g})")


def _neumaier_add(total: float, comp: float, value: float):
    t = total + value
    if abs(total) >= abs(value):
        comp += (total - t) + value
    else:
        comp += (value - t) + total
    return t, comp


class _CompensatedSum:
    """Neumaier-compensated accumulator for complex terms."""

    __slots__ = ("re", "im", "cre", "cim")

    def __init__(self):
        self.re = self.im = self.cre = self.cim = 0.0

    def add(self, z: complex):
        self.re, self.cre = _neumaier_add(self.re, self.cre, z.real)
        self.im, self.cim = _neumaier_add(self.im, self.cim, z.imag)

    @property
    def value(self) -> complex:
        return complex(self.re + self.cre, self.im + self.cim)


def eval_series(spec: HGSpec, t: complex, rtol: float = 1e-12):
    """Sum the series at t.  Returns (value, terms_used).

    Stops once three consecutive terms are each below rtol times the
    running partial sum (guards against even/odd term oscillation); the
    hard cap is ``MAX_TERMS``.
    """
    if rtol <= 0:
        raise ValueError("rtol must be positive")
    t = complex(t)
    _check_domain(spec, t)
    if t == 0:
        return 1.0 + 0.0j, 1
    acc = _CompensatedSum()
    acc.add(1.0 + 0.0j)
    term = 1.0 + 0.0j
    small_run = 0
    for i in range(1, MAX_TERMS + 1):
        term *= t * spec.term_ratio(i)
        acc.add(term)
        if abs(term) < rtol * abs(acc.value):
            small_run += 1
            if small_run >= _CONVERGED_RUN:
                return acc.value, i + 1
        else:
            small_run = 0
    raise SeriesError(f"no convergence within {MAX_TERMS} terms at t = {t}")


def eval_series_jet(spec: HGSpec, t: complex, rtol: float = 1e-12, order: int = 2):
    """Value and the first ``order`` t-derivatives, summed termwise.

    Returns (jet, terms_used) with jet[d] = d-th derivative at t.
    """
    t = complex(t)
    _check_domain(spec, t)
    jets = [_CompensatedSum() for _ in range(order + 1)]
    jets[0].add(1.0 + 0.0j)
    coeff = 1.0 + 0.0j
    small_run = 0
    terms = 1
    for i in range(1, MAX_TERMS + 1):
        coeff *= spec.term_ratio(i)
        # contribution of c_i t^i to the d-th derivative: c_i * i!/(i-d)! * t^(i-d)
        mags = 0.0
        fall = 1.0
        for d in range(order + 1):
            if i - d < 0:
                break
            contrib = coeff * fall * t ** (i - d)
            jets[d].add(contrib)
            mags = max(mags, abs(contrib) / max(abs(jets[d].value), 1e-300))
            fall *= i - d
        terms = i + 1
        if mags < rtol:
            small_run += 1
            if small_run >= _CONVERGED_RUN:
                break
        else:
            small_run = 0
    else:
        raise SeriesError(f"no convergence within {MAX_TERMS} terms at t = {t}")
    return tuple(j.value for j in jets), terms


def series_coefficients(spec: HGSpec, depth: int) -> np.ndarray:
    """Taylor coefficients c_0..c_depth of the series."""
    coeffs = np.empty(depth + 1, dtype=complex)
    coeffs[0] = 1.0
    for i in range(1, depth + 1):
        coeffs[i] = coeffs[i - 1] * spec.term_ratio(i)
    return coeffs


def _operator_polys(spec: HGSpec):
    """P, Q with P(i) c_i = Q(i-1) c_{i-1} the Frobenius recursion.

    P(s) = s prod(s + b - 1) is the delta part of the defining operator,
    Q(s) = prod(s + a) the t-multiplied part.
    """
    def P(s):
        out = s
        for b in spec.lower:
            out = out * (s + b - 1)
        return out

    def Q(s):
        out = 1.0 + 0.0j
        for a in spec.upper:
            out = out * (s + a)
        return out

    return P, Q


def operator_residual(spec: HGSpec, coeffs, t: complex, exponent: complex = 0.0) -> float:
    """Relative cancellation of the defining operator on a truncated series.

    ``coeffs`` are the coefficients of sum c_i t^(exponent + i).  The
    operator image restricted to the retained degrees is
    sum_i [P(rho+i) c_i - Q(rho+i-1) c_{i-1}] t^i (times t^rho, which drops
    out of the normalisation); the result is its magnitude at t divided by
    the largest retained monomial entering it.  Exact formal solutions give
    rounding-level values; the overflow monomial beyond the truncation
    order is deliberately not charged to the residual.
    """
    P, Q = _operator_polys(spec)
    t = complex(t)
    rho = complex(exponent)
    acc = _CompensatedSum()
    scale = 0.0
    prev = 0.0 + 0.0j
    tpow = 1.0 + 0.0j
    for i, c in enumerate(coeffs):
        lead = P(rho + i) * c
        lag = Q(rho + i - 1) * prev
        acc.add((lead - lag) * tpow)
        scale = max(scale, abs(lead * tpow), abs(lag * tpow))
        prev = c
        tpow *= t
    if scale == 0.0:
        return 0.0
    return abs(acc.value) / scale


def ode_residual(spec: HGSpec, t: complex, rtol: float = 1e-12) -> float:
    """Residual of the spec's own series in its defining operator at t.

    The series is truncated by the same rule as :func:`eval_series`; the
    residual is then the operator's relative cancellation failure on the
    retained terms (see :func:`operator_residual`).
    """
    t = complex(t)
    _check_domain(spec, t)
    if t == 0:
        return 0.0
    value, terms = eval_series(spec, t, rtol)
    coeffs = series_coefficients(spec, terms - 1)
    return operator_residual(spec, coeffs, t)


def riemann_scheme(spec: HGSpec) -> dict:
    """Local exponents of the defining Fuchsian operator at 0, 1, infinity.

    Only meaningful for the balanced case (n+1 upper, n lower, factorial
    included), whose singular points are exactly {0, 1, infinity}.  At
    t=1 the non-trivial exponent is sum(lower) - sum(upper); together with
    {0..n-1} there, {0, 1-b_i} at the origin and the upper parameters at
    infinity, the grand total is n(n+1)/2 as the residue theorem for the
    trace demands.
    """
    if spec.growth_exponent != 0 or not spec.includes_factorial:
        raise SeriesError("exponent scheme defined for the balanced (Fuchsian) case only")
    n = len(spec.lower)
    at_zero = [0.0 + 0.0j] + [1.0 - b for b in spec.lower]
    at_one = [complex(k) for k in range(n)]
    at_one.append(sum(spec.lower, 0.0 + 0.0j) - sum(spec.upper, 0.0 + 0.0j))
    at_inf = list(spec.upper)
    return {"zero": at_zero, "one": at_one, "infinity": at_inf}
