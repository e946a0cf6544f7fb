"""Independent reference solvers used to check the elimination code.

Neither routine shares code with the GTH path: one iterates v <- vP in
floating point, the other solves the stationary equations in exact
integer arithmetic.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import is_irreducible
from .errors import NonConvergenceError, NotStochasticError, ReducibleChainError, SingularSystemError


def power_iteration_oracle(m, tol=1e-12, max_iter=1_000_000, start=None) -> np.ndarray:
    """Iterate ``v <- v P`` until the l1 residual ``||v - vP||_1`` is at most ``tol``.

    The chain must be aperiodic; for a periodic chain pass the lazy
    chain ``(P + I) / 2``, which has the same stationary vector.
    """
    p = np.asarray(m, dtype=float)
    n = p.shape[0]
    v = np.full(n, 1.0 / n) if start is None else np.asarray(start, dtype=float)
    for _ in range(max_iter):
        w = v @ p
        w /= w.sum()
        if np.abs(w - w @ p).sum() <= tol:
            return w
        v = w
    raise NonConvergenceError(
        f"power iteration did not reach residual {tol} in {max_iter} iterations",
        gap=float(np.abs(v - v @ p).sum()),
    )


def _as_fractions(m):
    rows = [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in m]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotStochasticError("matrix must be square")
    for i, r in enumerate(rows):
        if any(x < 0 for x in r):
            raise NotStochasticError(f"row {i + 1} has a negative entry", i + 1)
        if sum(r) != 1:
            raise NotStochasticError(
                f"row {i + 1} sums to {sum(r)} exactly, not 1", i + 1, float(sum(r) - 1)
            )
    return rows


def _bareiss_solve(a, b):
    """Solve the integer system ``a x = b`` with fraction-free elimination.

    All intermediate quantities stay integers (every division is exact);
    only the final back substitution forms fractions.
    """
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    break
            else:
                raise SingularSystemError("stationary system is singular")
        pk = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            lik = rowi[k]
            for j in range(k + 1, n + 1):
                rowi[j] = (rowi[j] * pk - lik * rowk[j]) // prev
            rowi[k] = 0
        prev = pk
    if m[n - 1][n - 1] == 0:
        raise SingularSystemError("stationary system is singular")
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(m[i][n])
        for j in range(i + 1, n):
            acc -= m[i][j] * x[j]
        x[i] = acc / m[i][i]
    return x


def rational_solve_oracle(m) -> list:
    """Exact stationary vector of a chain with rational entries.

    ``m`` may hold ``Fraction``, ``int`` or ``float`` entries (floats are
    taken at their exact binary value), but every row must sum to one
    exactly. Returns a list of ``Fraction``.
    """
    rows = _as_fractions(m)
    n = len(rows)
    if not is_irreducible(np.array([[x > 0 for x in r] for r in rows])):
        raise ReducibleChainError("rational oracle requires an irreducible chain")
    if n == 1:
        return [Fraction(1)]
    # substitute y_i = pi_i / d_i so that every coefficient is an integer
    d = [math.lcm(*(x.denominator for x in r)) for r in rows]
    a = [[(d[i] if i == j else 0) - d[i] * rows[i][j] for i in range(n)] for j in range(n)]
    a = [[int(v) for v in row] for row in a]
    a[n - 1] = list(d)
    b = [0] * (n - 1) + [1]
    y = _bareiss_solve(a, b)
    return [d[i] * y[i] for i in range(n)]


def stationary_residual_exact(m, pi) -> Fraction:
    """Largest |(pi (I - P))_j| in exact arithmetic."""
    rows = _as_fractions(m)
    n = len(rows)
    return max(abs(pi[j] - sum(pi[i] * rows[i][j] for i in range(n))) for j in range(n))
