"""Core data handling for finite and countable Markov chains.

Matrices are plain ``numpy`` float arrays indexed from 0; every public
function that takes or returns *state labels* uses 1-based labels, so
state ``k`` lives at row ``k - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    InvalidSubsetError,
    NotStochasticError,
    ReducibleChainError,
    ValidationError,
)

ROW_TOL = 1e-12


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    message: str = ""
    row: Optional[int] = None  # 1-based
    deviation: float = 0.0

    def __bool__(self):
        return self.ok


def _check_square(m):
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def _validate(m, tol, substochastic):
    a = _check_square(m)
    if not np.all(np.isfinite(a)):
        i = int(np.argwhere(~np.isfinite(a))[0][0])
        return ValidationResult(False, f"row {i + 1} has a non-finite entry", i + 1, np.inf)
    bad = (a < 0) | (a > 1 + tol)
    if bad.any():
        i, j = (int(v) for v in np.argwhere(bad)[0])
        dev = float(-a[i, j] if a[i, j] < 0 else a[i, j] - 1)
        return ValidationResult(
            False, f"entry ({i + 1},{j + 1}) = {a[i, j]!r} lies outside [0, 1]", i + 1, dev
        )
    sums = a.sum(axis=1)
    dev = sums - 1.0
    if substochastic:
        viol = np.flatnonzero(dev > tol)
    else:
        viol = np.flatnonzero(np.abs(dev) > tol)
    if viol.size:
        i = int(viol[0])
        return ValidationResult(
            False, f"row {i + 1} sums to {sums[i]:.15g}", i + 1, float(dev[i])
        )
    return ValidationResult(True)


def validate_stochastic(m, tol=ROW_TOL) -> ValidationResult:
    """Check that ``m`` is square, entries lie in [0, 1] and rows sum to 1.

    Returns a falsy :class:`ValidationResult` naming the first violating
    row (1-based) instead of raising.
    """
    return _validate(m, tol, substochastic=False)


def validate_substochastic(m, tol=ROW_TOL) -> ValidationResult:
    return _validate(m, tol, substochastic=True)


def as_stochastic(m, tol=ROW_TOL, normalize=False) -> np.ndarray:
    """Return a float copy of ``m`` after validation, raising on failure.

    With ``normalize=True`` nonnegative rows are rescaled to sum to one
    before the check; otherwise off-by-a-bit rows are rejected.
    """
    a = np.array(_check_square(m), dtype=float)
    if normalize:
        if (a < 0).any():
            raise NotStochasticError("cannot normalize a matrix with negative entries")
        sums = a.sum(axis=1)
        if (sums <= 0).any():
            i = int(np.flatnonzero(sums <= 0)[0])
            raise NotStochasticError(f"row {i + 1} has zero mass", i + 1, -1.0)
        a /= sums[:, None]
    res = validate_stochastic(a, tol)
    if not res:
        raise NotStochasticError(res.message, res.row, res.deviation)
    return a


def as_substochastic(m, tol=ROW_TOL) -> np.ndarray:
    a = np.array(_check_square(m), dtype=float)
    res = validate_substochastic(a, tol)
    if not res:
        raise NotStochasticError(res.message, res.row, res.deviation)
    return a


def row_deficits(m) -> np.ndarray:
    """Missing mass ``1 - sum_j m[i, j]`` of each row."""
    return 1.0 - np.asarray(m, dtype=float).sum(axis=1)


def is_irreducible(m) -> bool:
    """True iff the graph with an edge i->j for every p_ij > 0 is strongly connected."""
    a = np.asarray(m)
    if a.shape[0] == 1:
        return True
    ncomp, _ = connected_components(a > 0, directed=True, connection="strong")
    return ncomp == 1


def require_irreducible(m):
    if not is_irreducible(m):
        raise ReducibleChainError("transition matrix is reducible")


@dataclass(frozen=True)
class Partition:
    """A censoring set ``E`` and its complement, both as 1-based labels.

    ``census`` keeps the caller's order (it fixes the state order of the
    censored chain); ``complement`` is ascending.
    """

    census: tuple
    complement: tuple
    n: int

    @classmethod
    def of(cls, census: Iterable[int], n: int) -> "Partition":
        e = tuple(int(k) for k in census)
        if not e:
            raise InvalidSubsetError("censoring set must be non-empty")
        if len(set(e)) != len(e):
            raise InvalidSubsetError(f"censoring set has repeated states: {e}")
        out = [k for k in e if not 1 <= k <= n]
        if out:
            raise InvalidSubsetError(f"states {out} outside 1..{n}")
        seen = set(e)
        return cls(e, tuple(k for k in range(1, n + 1) if k not in seen), n)

    @classmethod
    def leading(cls, k: int, n: int) -> "Partition":
        return cls.of(range(1, k + 1), n)

    @property
    def census_index(self) -> np.ndarray:
        return np.asarray(self.census, dtype=int) - 1

    @property
    def complement_index(self) -> np.ndarray:
        return np.asarray(self.complement, dtype=int) - 1


def parse_subset(text: str, n: int) -> Partition:
    """Parse ``"E=1,2,5"`` or ``"E=1..k"`` (the ``E=`` prefix is optional)."""
    body = text.strip()
    if body[:2].upper() == "E=":
        body = body[2:]
    labels = []
    try:
        for part in body.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                lo, hi = part.split("..")
                labels.extend(range(int(lo), int(hi) + 1))
            else:
                labels.append(int(part))
    except ValueError:
        raise InvalidSubsetError(f"cannot parse subset {text!r}") from None
    return Partition.of(labels, n)


@dataclass(frozen=True)
class CountableChainSpec:
    """Rule-based transition matrix on the states 1, 2, 3, ...

    ``kernel(i, j)`` gives p_ij and ``row_support(i)`` lists the (finitely
    many) columns where row ``i`` can be nonzero. ``exact_stationary`` and
    ``tail_mass`` are filled in for families with a closed-form answer;
    ``tail_mass(N)`` is the probability of the states above ``N``.
    """

    name: str
    kernel: Callable[[int, int], float]
    row_support: Callable[[int], Sequence[int]]
    exact_stationary: Optional[Callable[[int], float]] = None
    tail_mass: Optional[Callable[[int], float]] = None
    params: dict = field(default_factory=dict)

    def row(self, i: int) -> dict:
        return {j: self.kernel(i, j) for j in self.row_support(i)}

    def stationary_vector(self, n: int) -> np.ndarray:
        if self.exact_stationary is None:
            raise ValidationError(f"family {self.name!r} has no analytic stationary distribution")
        return np.array([self.exact_stationary(j) for j in range(1, n + 1)])

    def tail(self, n: int) -> float:
        """Sum of pi_k over k > n."""
        if self.tail_mass is not None:
            return float(self.tail_mass(n))
        if self.exact_stationary is None:
            raise ValidationError(f"family {self.name!r} has no analytic stationary distribution")
        total, k = 0.0, n + 1
        while True:
            term = self.exact_stationary(k)
            total += term
            if term < 1e-18 and k > n + 10:
                return total
            k += 1


def northwest_corner(spec: CountableChainSpec, n: int) -> np.ndarray:
    """The ``n`` x ``n`` block ``T_n`` of the countable matrix, read off the kernel."""
    if n < 1:
        raise ValidationError("corner size must be at least 1")
    t = np.zeros((n, n))
    for i in range(1, n + 1):
        row = spec.row(i)
        vals = np.fromiter(row.values(), dtype=float)
        if ((vals < 0) | (vals > 1)).any():
            raise NotStochasticError(f"kernel row {i} has entries outside [0, 1]", i)
        for j, p in row.items():
            if j <= n:
                t[i - 1, j - 1] = p
    return t
