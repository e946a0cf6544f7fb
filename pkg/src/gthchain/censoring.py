"""Censored (watched) chains and the excursion quantities behind GTH.

Watching a chain only while it sits in a subset E gives another Markov
chain with transition matrix ``T + U (I - Q)^{-1} D``, where the blocks
come from partitioning P by E and its complement.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order

from .core import ROW_TOL, Partition, as_substochastic, row_deficits, validate_stochastic
from .errors import InvalidSubsetError, SingularComplementError, ValidationError, ZeroDenominatorError
from .gth import EliminationTrace, gth_forward


def _partition(p, census) -> Partition:
    if isinstance(census, Partition):
        if census.n != p.shape[0]:
            raise InvalidSubsetError(f"partition is for {census.n} states, matrix has {p.shape[0]}")
        return census
    return Partition.of(census, p.shape[0])


@dataclass(frozen=True)
class CensorBlocks:
    T: np.ndarray
    U: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    partition: Partition

    def reassemble(self) -> np.ndarray:
        """Undo the permutation and return the original matrix."""
        n = self.partition.n
        order = np.concatenate([self.partition.census_index, self.partition.complement_index])
        full = np.block([[self.T, self.U], [self.D, self.Q]])
        out = np.empty((n, n))
        out[np.ix_(order, order)] = full
        return out


def partition_blocks(m, census) -> CensorBlocks:
    p = np.asarray(m, dtype=float)
    part = _partition(p, census)
    e, c = part.census_index, part.complement_index
    return CensorBlocks(
        T=p[np.ix_(e, e)],
        U=p[np.ix_(e, c)],
        D=p[np.ix_(c, e)],
        Q=p[np.ix_(c, c)],
        partition=part,
    )


def _check_complement_escapes(p, part: Partition, tol):
    """I - Q is singular iff some complement state can never leave the complement."""
    c = part.complement_index
    if c.size == 0:
        return
    n = p.shape[0]
    # reverse graph from a virtual sink fed by E and by every leaking row
    sink = n
    leaks = np.flatnonzero(row_deficits(p) > tol)
    src, dst = np.nonzero(p.T > 0)
    edges_from = list(src) + [sink] * (part.census_index.size + leaks.size)
    edges_to = list(dst) + list(part.census_index) + list(leaks)
    g = coo_matrix(
        (np.ones(len(edges_from)), (edges_from, edges_to)), shape=(n + 1, n + 1)
    ).tocsr()
    reached = set(breadth_first_order(g, sink, directed=True, return_predecessors=False))
    trapped = [int(k) + 1 for k in c if k not in reached]
    if trapped:
        raise SingularComplementError(
            f"states {trapped} never leave the complement of E; I - Q is singular"
        )


def minimal_inverse_apply(Q, D, method="solve", tol=1e-14, max_terms=1_000_000) -> np.ndarray:
    """Compute ``(sum_k Q^k) D``.

    ``method="solve"`` does one linear solve with ``(I - Q)``;
    ``method="neumann"`` sums the series until the increment drops to
    ``tol`` (max-entry) or ``max_terms`` terms have been added.
    """
    if Q.shape[0] == 0:
        return np.zeros_like(D)
    if method == "solve":
        try:
            x = np.linalg.solve(np.eye(Q.shape[0]) - Q, D)
        except np.linalg.LinAlgError as exc:
            raise SingularComplementError(str(exc)) from None
        if not np.all(np.isfinite(x)):
            raise SingularComplementError("solve with I - Q produced non-finite values")
        return x
    if method == "neumann":
        total = D.copy()
        term = D.copy()
        for _ in range(max_terms):
            term = Q @ term
            total += term
            if np.abs(term).max(initial=0.0) <= tol:
                return total
        raise SingularComplementError(f"Neumann series did not settle in {max_terms} terms")
    raise ValueError(f"unknown method {method!r}")


def censor(m, census, method="solve", tol=ROW_TOL) -> np.ndarray:
    """Transition matrix of the chain watched only on ``census`` (1-based labels).

    Works for stochastic and substochastic input; for stochastic input the
    result is checked to be stochastic as well. States of the result
    follow the order of ``census``.
    """
    p = as_substochastic(m, tol)
    part = _partition(p, census)
    b = partition_blocks(p, part)
    if not part.complement:
        return b.T.copy()
    _check_complement_escapes(p, part, tol)
    out = b.T + b.U @ minimal_inverse_apply(b.Q, b.D, method)
    if validate_stochastic(p, tol):
        res = validate_stochastic(out, max(tol, 1e-12))
        if not res:
            raise SingularComplementError(f"censored matrix lost mass: {res.message}")
    return out


def censor_stationary(pi, census) -> np.ndarray:
    """Restrict a stationary vector to ``census`` and renormalize."""
    v = np.asarray(pi, dtype=float)
    part = Partition.of(census, v.size) if not isinstance(census, Partition) else census
    sub = v[part.census_index]
    mass = sub.sum()
    if not mass > 0:
        raise ValidationError("probability vector puts no mass on the censoring set")
    return sub / mass


# -- excursion quantities read off the elimination ---------------------------


def _trace(m, trace: Optional[EliminationTrace]) -> EliminationTrace:
    return trace if trace is not None else gth_forward(m, keep_levels=False)


def _check_level(tr: EliminationTrace, n: int):
    if not 2 <= n <= tr.n:
        raise ValidationError(f"level must lie in 2..{tr.n}, got {n}")
    if not tr.denominators[n - 1] > 0:
        raise ZeroDenominatorError(n)


def visits_expected(m, n: int, i: int, trace=None) -> float:
    """Expected visits to ``n`` before the chain enters {1..n-1}.

    For ``i == n`` this is ``1 / s_n`` (the start counts as a visit); for
    ``i < n`` the excursion starts with a step out of ``i`` and the value
    is ``p^n_{i,n} / s_n``.
    """
    tr = _trace(m, trace)
    _check_level(tr, n)
    s = tr.denominators[n - 1]
    if i == n:
        return 1.0 / s
    if 1 <= i < n:
        return float(tr.column_above(n)[i - 1] / s)
    raise ValidationError(f"start state must lie in 1..{n}, got {i}")


def first_entry_probability(m, n: int, start: int, target: int, trace=None) -> float:
    """Probability tied to the first entrance into {1..n-1}.

    ``start == n``: probability the entrance happens at ``target``.
    ``start < n``: probability that, after leaving ``start``, the chain
    passes through ``n`` and then enters {1..n-1} at ``target``. This is
    the correction added to p^n_{start,target} when ``n`` is eliminated.
    """
    tr = _trace(m, trace)
    _check_level(tr, n)
    if not 1 <= target < n:
        raise ValidationError(f"target must lie in 1..{n - 1}, got {target}")
    g = tr.exit_row(n)[target - 1]
    if start == n:
        return float(g)
    if 1 <= start < n:
        return float(tr.column_above(n)[start - 1] * g)
    raise ValidationError(f"start state must lie in 1..{n}, got {start}")


def censored_transition(m, n: int, start: int, target: int, trace=None) -> float:
    """p^{n-1}_{start,target}: one step of the chain watched on {1..n-1}."""
    tr = trace if trace is not None and trace.levels else gth_forward(m, keep_levels=True)
    _check_level(tr, n)
    base = tr.level(n)[start - 1, target - 1]
    return float(base + first_entry_probability(m, n, start, target, tr))


# -- simulation ---------------------------------------------------------------


def simulate_chain(m, start: int, steps: int, seed: int) -> tuple:
    """A sample path of ``steps`` transitions, as 1-based labels (length steps + 1)."""
    p = np.asarray(m, dtype=float)
    cum = np.cumsum(p, axis=1)
    rng = np.random.default_rng(seed)
    u = rng.random(steps)
    path = [start]
    state = start - 1
    for x in u:
        state = min(int(np.searchsorted(cum[state], x, side="right")), p.shape[0] - 1)
        path.append(state + 1)
    return tuple(path)


@dataclass(frozen=True)
class Excursions:
    """Per-path outcomes of excursions until the chain enters {1..n-1}."""

    visits: np.ndarray  # visits to n (start counted when start == n)
    entry: np.ndarray  # 1-based state where {1..n-1} was entered
    via_n: np.ndarray  # whether n was visited after the start

    @property
    def paths(self) -> int:
        return self.visits.size


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float

    def agrees(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.stderr


def _mean(x) -> Estimate:
    x = np.asarray(x, dtype=float)
    return Estimate(float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size)))


def simulate_excursions(m, n: int, start: int, paths: int, seed: int, max_steps=10_000_000):
    """Run ``paths`` independent excursions from ``start`` until entry into {1..n-1}.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.

    At least one step is always taken, so for ``start < n`` this is the
    return to {1..n-1}.
    """
    p = np.asarray(m, dtype=float)
    cum = np.cumsum(p, axis=1)
    cum[:, -1] = np.inf
    rng = np.random.default_rng(seed)
    top = n - 1
    state = np.full(paths, start - 1)
    visits = np.full(paths, 1 if start == n else 0)
    via = np.zeros(paths, dtype=bool)
    entry = np.zeros(paths, dtype=int)
    active = np.arange(paths)
    steps = 0
    while active.size:
        if steps >= max_steps:
            raise RuntimeError("excursions did not terminate")
        u = rng.random(active.size)
        nxt = (cum[state[active]] <= u[:, None]).sum(axis=1)
        state[active] = nxt
        hit = nxt == top
        visits[active[hit]] += 1
        via[active[hit]] = True
        done = nxt < top
        entry[active[done]] = nxt[done] + 1
        active = active[~done]
        steps += 1
    return Excursions(visits, entry, via)


def estimate_visits(m, n, start, paths=1_000_000, seed=0) -> Estimate:
    return _mean(simulate_excursions(m, n, start, paths, seed).visits)


def estimate_first_entry(m, n, start, target, paths=1_000_000, seed=0) -> Estimate:
    ex = simulate_excursions(m, n, start, paths, seed)
    hit = ex.entry == target
    if start != n:
        hit &= ex.via_n
    return _mean(hit)
