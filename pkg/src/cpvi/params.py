"""Parameter algebra for the coupled Painleve VI hierarchy.

A rank-n parameter set carries 2n+2 scalars alpha_0..alpha_{2n+1} (indices
cyclic modulo 2n+2) and the auxiliary constant eta.  Generic sets satisfy
sum(alpha) = 1; confluent sets of level r >= 1 additionally have
alpha_{2i} = 0 for i < r, which keeps the same normalisation.  Cyclic
partial sums over index windows are the raw material for every residue
matrix, local exponent and hypergeometric parameter downstream, so they
live here.

Scalars are complex doubles in production; ``Fraction`` entries are
accepted as well and all window arithmetic then stays exact (used by the
rational cross-check of the series recurrence).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

SUM_TOL = 1e-12


class SamplingError(RuntimeError):
    """Rejection sampling could not meet the requested genericity margin."""


def _dist_to_int(z) -> float:
    """Euclidean distance from a scalar to the nearest (real) integer."""
    z = complex(z)
    return float(np.hypot(z.real - round(z.real), z.imag))


@dataclass(frozen=True)
class ParameterSet:
    """Rank, cyclic alpha tuple, eta, and the confluence level.

    ``degeneracy`` is 0 for a generic set and r in 1..n+1 for a confluent
    set of level r (alpha_0, alpha_2, ..., alpha_{2r-2} all zero).
    """

    n: int
    alpha: tuple
    eta: complex = 0.0
    degeneracy: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("rank must be >= 1")
        if len(self.alpha) != 2 * self.n + 2:
            raise ValueError(f"expected {2 * self.n + 2} alpha entries, got {len(self.alpha)}")
        if not 0 <= self.degeneracy <= self.n + 1:
            raise ValueError(f"confluence level {self.degeneracy} out of range 0..{self.n + 1}")
        total = sum(self.alpha, self.alpha[0] * 0)
        if abs(complex(total) - 1.0) > SUM_TOL:
            raise ValueError(f"alpha sum {total!r} violates the normalisation sum(alpha) = 1")
        for i in range(self.degeneracy):
            if abs(complex(self.alpha[2 * i])) > SUM_TOL:
                raise ValueError(f"level-{self.degeneracy} set needs alpha_{2 * i} = 0")

    # -- cyclic access -------------------------------------------------

    def alpha_at(self, i: int):
        return self.alpha[i % (2 * self.n + 2)]

    def partial_sum(self, k: int, l: int):
        """Window sum alpha_k + ... + alpha_{k+l}, empty (0) for l < 0.

        Indices are reduced mod 2n+2, so windows longer than a full period
        pick up whole copies of sum(alpha).
        """
        zero = self.alpha[0] * 0
        if l < 0:
            return zero
        m = 2 * self.n + 2
        k = k % m
        total = zero
        for i in range(k, k + l + 1):
            total = total + self.alpha[i % m]
        return total

    def shifted(self, s: int) -> "ParameterSet":
        """Cyclic relabelling alpha_i -> alpha_{i+s} (eta kept)."""
        m = 2 * self.n + 2
        rotated = tuple(self.alpha[(i + s) % m] for i in range(m))
        return ParameterSet(self.n, rotated, self.eta, 0)

    def with_degeneracy(self, r: int) -> "ParameterSet":
        """Reinterpret the set at confluence level r (invariants re-checked)."""
        return replace(self, degeneracy=r)

    def with_eta(self, eta) -> "ParameterSet":
        return replace(self, eta=eta)

    # -- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        kind = "generic" if self.degeneracy == 0 else {"degenerate": self.degeneracy}
        return {
            "n": self.n,
            "alpha": [_scalar_to_json(a) for a in self.alpha],
            "eta": _scalar_to_json(self.eta),
            "kind": kind,
        }

    @staticmethod
    def from_json(data: dict) -> "ParameterSet":
        kind = data.get("kind", "generic")
        degeneracy = 0 if kind == "generic" else int(kind["degenerate"])
        return ParameterSet(
            n=int(data["n"]),
            alpha=tuple(_scalar_from_json(a) for a in data["alpha"]),
            eta=_scalar_from_json(data.get("eta", 0.0)),
            degeneracy=degeneracy,
        )


def _scalar_to_json(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else [z.real, z.imag]


def _scalar_from_json(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def partial_sum(p: ParameterSet, k: int, l: int):
    """Free-function form of :meth:`ParameterSet.partial_sum`."""
    return p.partial_sum(k, l)


# -- genericity --------------------------------------------------------

def genericity_margin(p: ParameterSet) -> float:
    """Distance of the non-resonance quantities from the integers.

    The guarded quantities are the window sums starting at an even index
    with an even number of terms, the analogous odd-start windows, and
    (for generic sets) the total of the odd-indexed entries.  Together
    with sum(alpha) = 1 these bound every pivot, Pochhammer denominator
    and exponent difference used downstream away from the integers.  For
    a confluent set the odd total is structurally fixed, so it is not a
    free condition and is skipped.
    """
    n = p.n
    dists = []
    for i in range(1, n + 1):
        for j in range(1, n - i + 2):
            dists.append(_dist_to_int(p.partial_sum(2 * i, 2 * j - 1)))
            dists.append(_dist_to_int(p.partial_sum(2 * i - 1, 2 * j - 1)))
    if p.degeneracy == 0:
        odd_total = sum(p.alpha[1::2], p.alpha[0] * 0)
        dists.append(_dist_to_int(odd_total))
    return min(dists)


def sample_generic(n: int, seed: int, margin: float = 0.05,
                   max_attempts: int = 5000) -> ParameterSet:
    """Draw a real generic set with all non-resonance margins >= ``margin``.

    Deterministic in ``seed``; raises :class:`SamplingError` if rejection
    sampling fails within ``max_attempts`` draws (margin too demanding).
    """
    rng = np.random.default_rng(seed)
    m = 2 * n + 2
    for _ in range(max_attempts):
        draw = rng.uniform(-0.45, 0.75, m)
        draw += (1.0 - draw.sum()) / m
        eta = rng.uniform(-0.75, 0.75)
        p = ParameterSet(n, tuple(complex(a) for a in draw), complex(eta), 0)
        if genericity_margin(p) >= margin:
            return p
    raise SamplingError(
        f"no generic set with margin {margin} after {max_attempts} attempts (n={n})")


def sample_degenerate(n: int, r: int, seed: int, margin: float = 0.05,
                      max_attempts: int = 5000) -> ParameterSet:
    """Draw a real confluent set of level r with the window margins enforced."""
    if not 1 <= r <= n + 1:
        raise ValueError(f"confluence level {r} out of range 1..{n + 1}")
    rng = np.random.default_rng(seed)
    m = 2 * n + 2
    free = [i for i in range(m) if i % 2 == 1 or i >= 2 * r]
    for _ in range(max_attempts):
        alpha = np.zeros(m)
        draw = rng.uniform(-0.45, 0.75, len(free))
        draw += (1.0 - draw.sum()) / len(free)
        alpha[free] = draw
        eta = rng.uniform(-0.75, 0.75)
        p = ParameterSet(n, tuple(complex(a) for a in alpha), complex(eta), r)
        if genericity_margin(p) >= margin:
            return p
    raise SamplingError(
        f"no level-{r} set with margin {margin} after {max_attempts} attempts (n={n})")


def sample_rational_generic(n: int, seed: int, denominator: int = 97,
                            max_attempts: int = 5000) -> ParameterSet:
    """Generic set with exact ``Fraction`` entries and non-integer windows.

    Every window sum of even length (any start, any length up to a full
    period) is checked to be a non-integer exactly, which is what the
    exact recurrence/closed-form comparison divides by.
    """
    rng = np.random.default_rng(seed)
    m = 2 * n + 2
    for _ in range(max_attempts):
        nums = rng.integers(-40, 61, m)
        nums[-1] = denominator - int(nums[:-1].sum())
        alpha = tuple(Fraction(int(v), denominator) for v in nums)
        p = ParameterSet(n, alpha, Fraction(0), 0)
        ok = True
        for start in range(m):
            for card in range(2, m, 2):
                if p.partial_sum(start, card - 1).denominator == 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return p
    raise SamplingError(f"no rational generic set after {max_attempts} attempts (n={n})")


def degenerate_replace(p: ParameterSet, eps) -> ParameterSet:
    """Substitute the pair of entries that the next confluence step removes.

    For a level-s set (s = 0 generic) the substitution targets slots 2s and
    2s+1: alpha_{2s} -> -1/eps and alpha_{2s+1} -> alpha_{2s+1} + 1/eps.
    On chain inputs the erased slot holds 0 (a level-(s+1) set read at
    level s), so the inserted terms cancel and sum(alpha) is unchanged;
    the result is the finite-eps source system whose eps -> 0 limit is the
    level-(s+1) Hamiltonian.
    """
    eps = complex(eps)
    if eps == 0:
        raise ValueError("eps must be nonzero")
    s = p.degeneracy
    alpha = list(p.alpha)
    alpha[2 * s] = -1.0 / eps
    alpha[2 * s + 1] = complex(alpha[2 * s + 1]) + 1.0 / eps
    return ParameterSet(p.n, tuple(alpha), p.eta, s)
