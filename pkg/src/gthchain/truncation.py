"""Finite approximations of countable chains.

A truncation keeps the northwest corner ``T_N`` and returns the missing
row mass through an augmentation ``A_N`` so that ``T_N + A_N`` is
stochastic. The censored augmentation has no closed form in general; it
is obtained by closing a larger corner of size omega, censoring that
finite chain to {1..N}, and doubling omega until the result stops moving.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .censoring import censor
from .core import ROW_TOL, CountableChainSpec, Partition, is_irreducible, northwest_corner
from .errors import NonConvergenceError, NotStochasticError, ValidationError
from .gth import gth_solve

KINDS = ("censored", "last", "first", "column", "linear", "uniform")


@dataclass(frozen=True)
class AugmentationStrategy:
    """Where the missing mass of each truncated row goes.

    ``column`` is the target of ``kind="column"`` (1-based). ``kind="linear"``
    spreads the mass by ``weights`` (explicit, length N) or, if ``ratio``
    is given, by weights proportional to ratio**(k-1).
    """

    kind: str
    column: Optional[int] = None
    weights: Optional[tuple] = None
    ratio: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown augmentation {self.kind!r}")
        if self.kind == "column" and (self.column is None or self.column < 1):
            raise ValidationError("column augmentation needs a 1-based column index")
        if self.kind == "linear":
            if (self.weights is None) == (self.ratio is None):
                raise ValidationError("linear augmentation needs either weights or ratio")
            if self.weights is not None:
                w = np.asarray(self.weights, dtype=float)
                if (w < 0).any() or abs(w.sum() - 1.0) > ROW_TOL:
                    raise ValidationError("linear weights must be nonnegative and sum to 1")
            elif not self.ratio > 0:
                raise ValidationError("linear ratio must be positive")

    @property
    def name(self) -> str:
        if self.kind == "column":
            return f"col:{self.column}"
        if self.kind == "linear":
            if self.ratio is not None:
                return f"linear:{self.ratio:g}"
            return "linear:" + "/".join(f"{w:g}" for w in self.weights)
        return self.kind

    def spread(self, n: int) -> np.ndarray:
        """Distribution over the N columns that receives a row's deficit."""
        w = np.zeros(n)
        if self.kind == "last":
            w[-1] = 1.0
        elif self.kind == "first":
            w[0] = 1.0
        elif self.kind == "column":
            if self.column > n:
                raise ValidationError(f"column {self.column} outside 1..{n}")
            w[self.column - 1] = 1.0
        elif self.kind == "uniform":
            w[:] = 1.0 / n
        elif self.kind == "linear":
            if self.ratio is not None:
                w = self.ratio ** np.arange(n, dtype=float)
                w /= w.sum()
            else:
                if len(self.weights) != n:
                    raise ValidationError(f"linear weights have length {len(self.weights)}, need {n}")
                w = np.asarray(self.weights, dtype=float)
        else:
            raise ValidationError("the censored augmentation needs the whole chain; use censored_truncation")
        return w


CENSORED = AugmentationStrategy("censored")
LAST_COLUMN = AugmentationStrategy("last")
FIRST_COLUMN = AugmentationStrategy("first")
UNIFORM = AugmentationStrategy("uniform")


def parse_strategy(text: str) -> AugmentationStrategy:
    """``censored``, ``last``, ``first``, ``uniform``, ``col:J``, ``linear:a`` or ``linear:w1/w2/...``."""
    t = text.strip().lower()
    aliases = {"lastcolumn": "last", "firstcolumn": "first", "censor": "censored"}
    t = aliases.get(t, t)
    if t in ("censored", "last", "first", "uniform"):
        return AugmentationStrategy(t)
    head, _, arg = t.partition(":")
    try:
        if head in ("col", "column"):
            return AugmentationStrategy("column", column=int(arg))
        if head == "linear":
            if "/" in arg:
                return AugmentationStrategy("linear", weights=tuple(float(x) for x in arg.split("/")))
            return AugmentationStrategy("linear", ratio=float(arg))
    except ValueError:
        pass
    raise ValidationError(f"cannot parse augmentation {text!r}")


def augment(corner, strategy: AugmentationStrategy, tol=ROW_TOL) -> np.ndarray:
    """``T_N + A_N`` where row i of ``A_N`` is ``d_i * strategy.spread(N)``."""
    t = np.array(corner, dtype=float)
    if (t < 0).any():
        raise NotStochasticError("corner has negative entries")
    d = 1.0 - t.sum(axis=1)
    if (d < -tol).any():
        i = int(np.flatnonzero(d < -tol)[0])
        raise NotStochasticError(f"row {i + 1} of the corner has mass above 1", i + 1, float(-d[i]))
    d = np.clip(d, 0.0, None)
    return t + np.outer(d, strategy.spread(t.shape[0]))


@dataclass(frozen=True)
class OuterTruncation:
    """Closure of an omega x omega corner used as P(omega).

    ``closure=None`` keeps the raw (substochastic) corner.
    """

    omega: int
    closure: Optional[AugmentationStrategy] = LAST_COLUMN

    def matrix(self, spec: CountableChainSpec) -> np.ndarray:
        t = northwest_corner(spec, self.omega)
        return t if self.closure is None else augment(t, self.closure)


@dataclass(frozen=True)
class CensoredTruncation:
    matrix: np.ndarray
    omega: int
    gap: float
    history: tuple = ()  # (omega, gap to previous omega)


def censored_truncation(
    spec: CountableChainSpec,
    n: int,
    outer: Optional[OuterTruncation] = None,
    ctol: float = 1e-12,
    omega_cap: Optional[int] = None,
) -> CensoredTruncation:
    """Approximate the censored chain on {1..n} through closed outer corners.

    Starts at ``outer.omega`` (default 4n) and doubles omega until two
    successive censored matrices agree to ``ctol`` in every entry. Raises
    :class:`NonConvergenceError` once omega would exceed ``omega_cap``
    (default 1024n).
    """
    if outer is None:
        outer = OuterTruncation(4 * n)
    if outer.omega <= n:
        raise ValidationError(f"outer size {outer.omega} must exceed N = {n}")
    cap = 1024 * n if omega_cap is None else omega_cap

    def at(omega):
        p = OuterTruncation(omega, outer.closure).matrix(spec)
        return censor(p, Partition.leading(n, omega))

    omega = outer.omega
    prev = at(omega)
    history = []
    while True:
        nxt_omega = 2 * omega
        if nxt_omega > cap:
            gap = history[-1][1] if history else float("nan")
            raise NonConvergenceError(
                f"censored truncation for N={n} did not settle below {ctol} by omega={omega}",
                gap=gap,
            )
        cur = at(nxt_omega)
        gap = float(np.abs(cur - prev).max())
        history.append((nxt_omega, gap))
        if gap <= ctol:
            return CensoredTruncation(cur, nxt_omega, gap, tuple(history))
        prev, omega = cur, nxt_omega


def l1_error(estimate, spec: CountableChainSpec, n: int) -> float:
    """sum_{k<=N} |estimate_k - pi_k| + sum_{k>N} pi_k."""
    est = np.asarray(estimate, dtype=float)
    if est.size != n:
        raise ValidationError(f"estimate has {est.size} entries, expected {n}")
    pi = spec.stationary_vector(n)
    return float(np.abs(est - pi).sum() + spec.tail(n))


def truncated_matrix(spec, n, strategy, **kw):
    """The N x N approximation for one strategy (plus the omega result for censored)."""
    if strategy.kind == "censored":
        res = censored_truncation(spec, n, **kw)
        return res.matrix, res
    return augment(northwest_corner(spec, n), strategy), None


@dataclass(frozen=True)
class TruncationRow:
    strategy: str
    N: int
    estimate: np.ndarray
    l1_error: float
    runtime_ms: float
    omega: Optional[int] = None
    omega_gap: Optional[float] = None


@dataclass
class TruncationReport:
    family: str
    rows: List[TruncationRow] = field(default_factory=list)
    skipped: List[tuple] = field(default_factory=list)  # (strategy, N, reason)

    def errors(self) -> dict:
        return {(r.strategy, r.N): r.l1_error for r in self.rows}

    def censored_violations(self, slack=1e-12) -> list:
        """(N, strategy, censored error, other error) wherever censored is not minimal."""
        errs = self.errors()
        out = []
        for r in self.rows:
            c = errs.get(("censored", r.N))
            if c is not None and r.strategy != "censored" and c > r.l1_error + slack:
                out.append((r.N, r.strategy, c, r.l1_error))
        return out

    def to_csv(self, timing=True) -> str:
        lines = ["family,strategy,N,l1_error,runtime_ms"]
        for r in self.rows:
            ms = f"{r.runtime_ms:.3f}" if timing else "0"
            lines.append(f"{self.family},{r.strategy},{r.N},{r.l1_error:.12g},{ms}")
        return "\n".join(lines) + "\n"

    def to_json(self, timing=True) -> str:
        doc = {
            "family": self.family,
            "rows": [
                {
                    "strategy": r.strategy,
                    "N": r.N,
                    "l1_error": r.l1_error,
                    "runtime_ms": r.runtime_ms if timing else 0.0,
                    "omega": r.omega,
                    "omega_gap": r.omega_gap,
                    "estimate": [float(x) for x in r.estimate],
                }
                for r in self.rows
            ],
            "skipped": [{"strategy": s, "N": n, "reason": why} for s, n, why in self.skipped],
        }
        return json.dumps(doc, indent=2) + "\n"


def compare_augmentations(
    spec: CountableChainSpec,
    Ns: Sequence[int],
    strategies: Sequence[AugmentationStrategy],
    ctol: float = 1e-12,
    omega_cap: Optional[int] = None,
) -> TruncationReport:
    """Solve every (strategy, N) truncation and score it by the l1(N, inf) error.

    Rows come out sorted by strategy (in the given order) then N. Cells
    whose augmented matrix is reducible, or whose strategy does not
    apply at that N, are listed in ``report.skipped``. ``omega_cap`` bounds
    the outer size of the censored strategy (default 1024 N).
    """
    report = TruncationReport(spec.name)
    for strat in strategies:
        for n in sorted(Ns):
            t0 = time.perf_counter()
            kw = {"ctol": ctol, "omega_cap": omega_cap} if strat.kind == "censored" else {}
            try:
                m, res = truncated_matrix(spec, n, strat, **kw)
            except ValidationError as exc:
                report.skipped.append((strat.name, n, str(exc)))
                continue
            if not is_irreducible(m):
                report.skipped.append((strat.name, n, "augmented matrix is reducible"))
                continue
            est = gth_solve(m)
            ms = (time.perf_counter() - t0) * 1e3
            report.rows.append(
                TruncationRow(
                    strat.name, n, est, l1_error(est, spec, n), ms,
                    omega=res.omega if res else None,
                    omega_gap=res.gap if res else None,
                )
            )
    return report


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    l1_error: float
    window_gap: float


def convergence_study(spec, strategy, Ns, window=3, **kw) -> List[ConvergenceRow]:
    """l1 error and the max gap between the truncated chain and P on a fixed window of states."""
    rows = []
    for n in sorted(Ns):
        m, _ = truncated_matrix(spec, n, strategy, **kw)
        w = min(window, n)
        gap = float(np.abs(m[:w, :w] - northwest_corner(spec, w)).max())
        rows.append(ConvergenceRow(n, l1_error(gth_solve(m), spec, n), gap))
    return rows
