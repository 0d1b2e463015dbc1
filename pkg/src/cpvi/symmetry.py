"""Birational symmetries of the symmetric Hamiltonian system.

The symmetry group is generated by 2n+2 involutions attached to the nodes
of a cyclic diagram: the Cartan matrix has 2 on the diagonal and -1
between cyclic neighbours.  Odd-node generators shift one position
coordinate by a residue of its conjugate momentum, even-node generators
shift two momenta by a residue of a position difference, and the two
generators closing the cycle (indices 0 and 2n+1) additionally rescale
the whole state by a power of t.  Every generator acts affinely on the
parameters via the Cartan matrix and shifts eta by its own alpha with an
alternating sign, which keeps the constraint sum(x_i y_i) + eta = 0
invariant.

Products of two distinct generators have order 3 on cyclic neighbours and
order 2 otherwise, so the group is the affine Weyl group of the cyclic
diagram; the relation suite in the tests checks exactly that on random
regular states.
"""

from __future__ import annotations

import numpy as np

from .params import ParameterSet, sample_generic


class SingularTransformError(ZeroDivisionError):
    """A generator was applied where one of its denominators vanishes."""


_DENOM_TOL = 1e-12


def cartan_matrix(n: int) -> np.ndarray:
    """Cyclic Cartan matrix of size 2n+2 (rows sum to zero)."""
    m = 2 * n + 2
    a = 2 * np.eye(m, dtype=int)
    for i in range(m):
        a[i, (i + 1) % m] = -1
        a[i, (i - 1) % m] = -1
    return a


def poisson_bracket(f, g, h: float = 1e-6):
    """Canonical bracket evaluator for state functions f(x, y), g(x, y).

    The structure constants are {x_i, y_j} = -delta_ij, so
    {f, g} = sum_i df/dy_i dg/dx_i - df/dx_i dg/dy_i, evaluated with
    central differences (exact to rounding for the polynomial and rational
    functions used here).
    """

    def bracket(x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        total = 0.0 + 0.0j
        for i in range(len(x)):
            def d(fun, arr, idx):
                step = h * max(1.0, abs((x if arr == 0 else y)[idx]))
                xp, yp = x.copy(), y.copy()
                xm, ym = x.copy(), y.copy()
                if arr == 0:
                    xp[idx] += step
                    xm[idx] -= step
                else:
                    yp[idx] += step
                    ym[idx] -= step
                return (fun(xp, yp) - fun(xm, ym)) / (2 * step)

            total += d(f, 1, i) * d(g, 0, i) - d(f, 0, i) * d(g, 1, i)
        return total

    return bracket


def coordinate(kind: str, idx: int):
    """Coordinate function x_idx or y_idx as a callable state function."""
    if kind == "x":
        return lambda x, y: x[idx]
    if kind == "y":
        return lambda x, y: y[idx]
    raise ValueError("kind must be 'x' or 'y'")


def _transform_params(p: ParameterSet, i: int) -> ParameterSet:
    a = cartan_matrix(p.n)
    ai = p.alpha[i]
    alpha = tuple(p.alpha[j] - a[i, j] * ai for j in range(2 * p.n + 2))
    eta = p.eta + (-1) ** i * ai
    return ParameterSet(p.n, alpha, eta, p.degeneracy)


def apply_generator(i: int, x, y, p: ParameterSet, t: float):
    """Apply generator i to a state and its parameters at time t.

    Returns (x', y', params').  Raises :class:`SingularTransformError` when
    the generator's denominator vanishes at the state, and ValueError for
    t <= 0 when the generator carries a power of t (principal branch).
    """
    n = p.n
    if not 0 <= i <= 2 * n + 1:
        raise ValueError(f"generator index {i} out of range 0..{2 * n + 1}")
    x = np.asarray(x, dtype=complex).copy()
    y = np.asarray(y, dtype=complex).copy()
    ai = complex(p.alpha[i])
    if i == 0:
        if t <= 0:
            raise ValueError("t must be positive for the cycle-closing generators")
        den = x[n] - t * x[0]
        if abs(den) < _DENOM_TOL:
            raise SingularTransformError("generator 0: x_n - t x_0 vanishes")
        w = t ** (-ai)
        y_new = y.copy()
        y_new[0] += t * ai / den
        y_new[n] -= ai / den
        return w * x, y_new / w, _transform_params(p, 0)
    if i == 2 * n + 1:
        if t <= 0:
            raise ValueError("t must be positive for the cycle-closing generators")
        if abs(y[n]) < _DENOM_TOL:
            raise SingularTransformError(f"generator {i}: y_n vanishes")
        w = t ** ai
        x_new = x.copy()
        x_new[n] += ai / y[n]
        return w * x_new, y / w, _transform_params(p, i)
    if i % 2 == 1:
        j = (i - 1) // 2          # acts through the momentum y_j
        if abs(y[j]) < _DENOM_TOL:
            raise SingularTransformError(f"generator {i}: y_{j} vanishes")
        x_new = x.copy()
        x_new[j] += ai / y[j]
        return x_new, y, _transform_params(p, i)
    j = i // 2                    # even generator, acts through x_{j-1} - x_j
    den = x[j - 1] - x[j]
    if abs(den) < _DENOM_TOL:
        raise SingularTransformError(f"generator {i}: x_{j - 1} - x_{j} vanishes")
    y_new = y.copy()
    y_new[j - 1] -= ai / den
    y_new[j] += ai / den
    return x, y_new, _transform_params(p, i)


def apply_word(word, x, y, p: ParameterSet, t: float):
    """Left-to-right composition of generators; errors carry the position."""
    for pos, i in enumerate(word):
        try:
            x, y, p = apply_generator(int(i), x, y, p, t)
        except (SingularTransformError, ValueError) as exc:
            raise type(exc)(f"at word position {pos} (generator {i}): {exc}") from exc
    return x, y, p


def sample_regular_state(n: int, rng, t: float, margin: float = 0.05,
                         max_attempts: int = 1000):
    """Random state keeping every generator denominator away from zero."""
    for _ in range(max_attempts):
        x = rng.uniform(0.5, 1.5, n + 1) * rng.choice([-1.0, 1.0], n + 1)
        y = rng.uniform(0.3, 1.3, n + 1) * rng.choice([-1.0, 1.0], n + 1)
        if np.min(np.abs(y)) < margin:
            continue
        if np.min(np.abs(np.diff(x))) < margin:
            continue
        if abs(x[-1] - t * x[0]) < margin:
            continue
        return x.astype(complex), y.astype(complex)
    raise RuntimeError("could not sample a regular state")


def word_deviation(word, x, y, p: ParameterSet, t: float) -> float:
    """Distance of a word's action from the identity at a state."""
    x2, y2, p2 = apply_word(word, x, y, p, t)
    dev = max(np.max(np.abs(x2 - x)), np.max(np.abs(y2 - y)))
    dev = max(dev, np.max(np.abs(np.array(p2.alpha) - np.array(p.alpha))))
    return max(dev, abs(complex(p2.eta) - complex(p.eta)))


def relation_words(n: int):
    """The defining relations: squares, braids on neighbours, commutations."""
    m = 2 * n + 2
    words = [("square", (i, i)) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if (i - j) % m in (1, m - 1):
                words.append(("braid", (i, j) * 3))
            else:
                words.append(("commute", (i, j) * 2))
    return words


def verify_relations(n: int, trials: int, seed: int, t: float = 0.4):
    """Worst deviation of every defining relation over random regular states.

    Returns a dict mapping relation class to the maximal deviation seen.
    States where an intermediate step hits a denominator are resampled.
    """
    rng = np.random.default_rng(seed)
    worst = {"square": 0.0, "braid": 0.0, "commute": 0.0, "alpha_total": 0.0}
    words = relation_words(n)
    for trial in range(trials):
        p = sample_generic(n, seed=seed + 1000 * trial + 1)
        x, y = sample_regular_state(n, rng, t)
        total0 = sum(p.alpha)
        for kind, word in words:
            for attempt in range(50):
                try:
                    dev = word_deviation(word, x, y, p, t)
                    break
                except (SingularTransformError, ValueError):
                    x, y = sample_regular_state(n, rng, t)
            else:
                raise RuntimeError(f"no regular state found for relation {word}")
            worst[kind] = max(worst[kind], dev)
        # alpha total is preserved by single generators (zero row sums)
        for i in range(2 * n + 2):
            _, _, p2 = apply_generator(i, x, y, p, t)
            worst["alpha_total"] = max(worst["alpha_total"], abs(sum(p2.alpha) - total0))
    return worst
