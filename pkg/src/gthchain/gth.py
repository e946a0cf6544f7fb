"""GTH elimination for stationary distributions, plus a textbook GE baseline.

The forward phase eliminates states N, N-1, ..., 2 in that order. Each
step replaces ``1 - p_nn`` by the explicit sum of the off-diagonal row
entries, so no probability is ever subtracted from another and the
result stays accurate componentwise even for nearly-uncoupled chains.

Everything happens in one N x N workspace. When state ``n`` is
eliminated, row ``n`` left of the diagonal is divided by the
denominator ``s_n``; afterwards only the leading (n-1) x (n-1) block
changes. At the end the workspace therefore holds

* above the diagonal, column n:  p^n_{i,n}          (i < n)
* on the diagonal:               p^n_{n,n}
* below the diagonal, row n:     p^n_{n,j} / s_n    (j < n)

which is exactly what back substitution and the RG-factorization need.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .core import ROW_TOL, as_stochastic, require_irreducible
from .errors import PivotUnderflowError, ValidationError, ZeroDenominatorError


def _ascending_sum(x: np.ndarray) -> float:
    # np.sum is pairwise; accumulate gives the plain left-to-right sum
    if x.size == 0:
        return 0.0
    return float(np.add.accumulate(x)[-1])


def _row_sum(x, compensated):
    return math.fsum(x) if compensated else _ascending_sum(x)


def _eliminate_in_place(a: np.ndarray, n: int, compensated: bool = False) -> float:
    """Eliminate state ``n`` (1-based) from the leading n x n block of ``a``."""
    k = n - 1
    s = _row_sum(a[k, :k], compensated)
    if not s > 0.0:
        raise ZeroDenominatorError(n)
    a[k, :k] /= s
    a[:k, :k] += np.outer(a[:k, k], a[k, :k])
    return s


@dataclass(frozen=True)
class EliminationTrace:
    """Result of the forward phase.

    ``denominators[n - 1]`` is s_n = sum_{k<n} p^n_{n,k}; ``denominators[0]``
    is the empty sum 0. ``levels`` maps n to the full n x n array p^n and
    is only populated when requested.
    """

    n: int
    workspace: np.ndarray
    denominators: np.ndarray
    levels: Optional[Dict[int, np.ndarray]] = field(default=None, repr=False)

    def level(self, k: int) -> np.ndarray:
        if self.levels is None:
            raise ValueError("trace was computed without keep_levels=True")
        return self.levels[k]

    def column_above(self, n: int) -> np.ndarray:
        """p^n_{i,n} for i = 1..n-1."""
        return self.workspace[: n - 1, n - 1]

    def exit_row(self, n: int) -> np.ndarray:
        """p^n_{n,j} / s_n for j = 1..n-1."""
        return self.workspace[n - 1, : n - 1]


def gth_eliminate_step(level, compensated=False) -> np.ndarray:
    """Censor the top state out of one reduced coefficient array.

    Returns the (n-1) x (n-1) array
    ``p'_ij = p_ij + p_in p_nj / sum_{k<n} p_nk``.
    """
    a = np.array(level, dtype=float)
    n = a.shape[0]
    if n < 2:
        raise ValidationError("cannot eliminate from a 1 x 1 level")
    _eliminate_in_place(a, n, compensated)
    return a[: n - 1, : n - 1].copy()


def gth_forward(m, keep_levels=True, compensated=False, tol=ROW_TOL) -> EliminationTrace:
    """Run the forward eliminations N -> 2 on a stochastic matrix.

    Irreducibility is not checked up front: an absorbing top block
    surfaces as :class:`ZeroDenominatorError` at the offending level.
    """
    a = as_stochastic(m, tol)
    n = a.shape[0]
    den = np.zeros(n)
    levels = {n: a.copy()} if keep_levels else None
    for k in range(n, 1, -1):
        den[k - 1] = _eliminate_in_place(a, k, compensated)
        if keep_levels:
            levels[k - 1] = a[: k - 1, : k - 1].copy()
    return EliminationTrace(n, a, den, levels)


def gth_back_substitute(trace: EliminationTrace, compensated=False) -> np.ndarray:
    """Ratios r_j = pi_j / pi_1 from a forward trace (r_1 = 1)."""
    w = trace.workspace
    r = np.zeros(trace.n)
    r[0] = 1.0
    for j in range(1, trace.n):
        r[j] = _row_sum(r[:j] * w[:j, j], compensated) / trace.denominators[j]
    return r


def gth_solve(m, compensated=False, tol=ROW_TOL) -> np.ndarray:
    """Stationary distribution of an irreducible stochastic matrix.

    Parameters
    ----------
    m : array_like, shape (N, N)
        Row-stochastic transition matrix.
    compensated : bool
        Use compensated (``math.fsum``) summation for the denominators
        and the back-substitution sums.

    Returns
    -------
    numpy.ndarray
        The probability vector pi with pi = pi P.
    """
    a = as_stochastic(m, tol)
    if a.shape[0] == 1:
        return np.ones(1)
    require_irreducible(a)
    trace = gth_forward(a, keep_levels=False, compensated=compensated)
    r = gth_back_substitute(trace, compensated)
    return r / _row_sum(r, compensated)


def naive_gaussian_solve(m, tol=ROW_TOL) -> np.ndarray:
    """Stationary vector by ordinary Gaussian elimination on ``I - P``.

    Same elimination order as GTH, but the pivots are the diagonal of
    ``I - P`` updated by subtraction. Exists to show what the subtraction
    costs; pivot underflow is raised rather than patched over.
    """
    p = as_stochastic(m, tol)
    n = p.shape[0]
    if n == 1:
        return np.ones(1)
    require_irreducible(p)
    # work on the transpose so that the equations for pi are rows
    a = np.eye(n) - p
    eps = np.finfo(float).eps
    for k in range(n - 1, 0, -1):
        piv = a[k, k]
        if abs(piv) <= eps:
            raise PivotUnderflowError(k + 1, float(piv))
        a[:k, :k] -= np.outer(a[:k, k], a[k, :k]) / piv
    x = np.zeros(n)
    x[0] = 1.0
    for j in range(1, n):
        x[j] = -(x[:j] @ a[:j, j]) / a[j, j]
    return x / x.sum()
