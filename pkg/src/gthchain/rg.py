"""RG-factorization ``I - P = (I - R_U)(I - Psi_D)(I - G_L)``.

``R_U`` holds r_ij (i < j), the expected number of visits to j before the
chain drops below j, starting from i. ``G_L`` holds g_ij (i > j), the
probability that the first state below i that the chain enters is j.
``Psi_D`` holds psi_n = p^n_nn from the elimination. All three are read
straight off the GTH workspace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .censoring import censor
from .core import ROW_TOL, Partition, as_stochastic, require_irreducible
from .errors import FormatError, SingularComplementError, ValidationError
from .gth import gth_forward


@dataclass(frozen=True)
class RGFactors:
    R: np.ndarray  # strictly upper triangular
    psi: np.ndarray  # diagonal of Psi_D
    G: np.ndarray  # strictly lower triangular

    @property
    def n(self) -> int:
        return self.psi.size

    @property
    def Psi(self) -> np.ndarray:
        return np.diag(self.psi)


def rg_factorize(m, tol=ROW_TOL) -> RGFactors:
    p = as_stochastic(m, tol)
    require_irreducible(p)
    tr = gth_forward(p, keep_levels=False)
    w = tr.workspace
    n = tr.n
    R = np.triu(w, 1)
    if n > 1:
        R[:, 1:] /= tr.denominators[1:]
    return RGFactors(R=R, psi=np.diag(w).copy(), G=np.tril(w, -1))


def rg_reconstruct(f: RGFactors) -> np.ndarray:
    """The triple product (I - R_U)(I - Psi_D)(I - G_L)."""
    eye = np.eye(f.n)
    return (eye - f.R) @ (eye - f.Psi) @ (eye - f.G)


def reconstruction_residual(m, f: RGFactors) -> float:
    p = np.asarray(m, dtype=float)
    return float(np.abs(rg_reconstruct(f) - (np.eye(p.shape[0]) - p)).max())


def rg_measure_firstpassage(m, i: int, j: int) -> float:
    """One RG-measure from its first-passage definition (1-based states).

    ``i <= j``: r_ij, expected visits to j before hitting {1..j-1}. When
    ``i < j`` the start already lies in {1..j-1}, so the count starts
    after the first step. ``i > j``: g_ij, probability that the chain
    started at i first enters {1..i-1} at j.

    Solves the taboo linear systems directly and shares no code with the
    elimination.
    """
    p = as_stochastic(m)
    n = p.shape[0]
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValidationError(f"states must lie in 1..{n}")
    if i <= j:
        high = np.arange(j - 1, n)  # states j..n
        a = np.eye(high.size) - p[np.ix_(high, high)]
        e = np.zeros(high.size)
        e[0] = 1.0
        try:
            # column of (I - P_HH)^{-1} for target j
            col = np.linalg.solve(a, e)
        except np.linalg.LinAlgError:
            raise SingularComplementError(f"taboo system above state {j} is singular") from None
        if i == j:
            return float(col[0])
        return float(p[i - 1, high] @ col)
    high = np.arange(i - 1, n)  # states i..n
    a = np.eye(high.size) - p[np.ix_(high, high)]
    try:
        h = np.linalg.solve(a, p[high, j - 1])
    except np.linalg.LinAlgError:
        raise SingularComplementError(f"taboo system above state {i} is singular") from None
    return float(h[0])


def rg_measures_firstpassage(m) -> RGFactors:
    """All r_ij (i < j), g_ij (i > j) and psi_n from the first-passage definitions.

    psi_n comes from r_nn = 1 / (1 - psi_n); psi_1 = 1 since the one-state
    censored chain always returns.
    """
    p = as_stochastic(m)
    n = p.shape[0]
    R = np.zeros((n, n))
    G = np.zeros((n, n))
    psi = np.ones(n)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a < b:
                R[a - 1, b - 1] = rg_measure_firstpassage(p, a, b)
            elif a > b:
                G[a - 1, b - 1] = rg_measure_firstpassage(p, a, b)
    for k in range(2, n + 1):
        psi[k - 1] = 1.0 - 1.0 / rg_measure_firstpassage(p, k, k)
    return RGFactors(R, psi, G)


@dataclass(frozen=True)
class InvarianceReport:
    n: int
    r_gap: float
    g_gap: float
    psi_gap: float

    @property
    def max_gap(self) -> float:
        return max(self.r_gap, self.g_gap, self.psi_gap)


def verify_censoring_invariance(m, n: int) -> InvarianceReport:
    """Compare RG-measures of P with those of P censored to {1..n}.

    Covers r_ij for i < j <= n, g_ij for j < i <= n and psi_k for k <= n.
    """
    p = as_stochastic(m)
    N = p.shape[0]
    if not 1 <= n <= N:
        raise ValidationError(f"censoring level must lie in 1..{N}")
    full = rg_factorize(p)
    sub = rg_factorize(censor(p, Partition.leading(n, N)))
    return InvarianceReport(
        n=n,
        r_gap=float(np.abs(full.R[:n, :n] - sub.R).max(initial=0.0)),
        g_gap=float(np.abs(full.G[:n, :n] - sub.G).max(initial=0.0)),
        psi_gap=float(np.abs(full.psi[:n] - sub.psi).max(initial=0.0)),
    )


def solve_via_rg(f: RGFactors) -> np.ndarray:
    """Stationary vector from the factors: x (I - R_U) = 0 restricted to x_1 = 1.

    pi (I - R_U)(I - Psi_D)(I - G_L) = 0 and (I - Psi_D) kills only the
    first coordinate, so pi (I - R_U) is proportional to e_1. Forward
    substitution over the columns of R_U gives the GTH ratios.
    """
    n = f.n
    x = np.zeros(n)
    x[0] = 1.0
    for j in range(1, n):
        x[j] = float(np.add.accumulate(x[:j] * f.R[:j, j])[-1])
    return x / x.sum()


# -- text format: sections R, PSI, G -------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def format_rg(f: RGFactors, residual=None) -> str:
    n = f.n
    lines = [str(n), "R"]
    lines += [" ".join(_fmt(v) for v in row) for row in f.R]
    lines += ["PSI", " ".join(_fmt(v) for v in f.psi), "G"]
    lines += [" ".join(_fmt(v) for v in row) for row in f.G]
    if residual is not None:
        lines.append(f"# reconstruction_residual {residual:.6e}")
    return "\n".join(lines) + "\n"


def parse_rg(text: str) -> RGFactors:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line))
    if not rows:
        raise FormatError("empty RG file")
    try:
        n = int(rows[0][1])
    except ValueError:
        raise FormatError("first line must be the state count", rows[0][0]) from None
    expected = 1 + (1 + n) + 2 + (1 + n)
    if len(rows) != expected:
        raise FormatError(f"expected {expected} non-comment lines, found {len(rows)}")

    def section(pos, name):
        if rows[pos][1] != name:
            raise FormatError(f"expected section header {name!r}", rows[pos][0])

    def numbers(pos):
        lineno, line = rows[pos]
        out = []
        for col, tok in enumerate(line.split(), 1):
            try:
                out.append(float(tok))
            except ValueError:
                raise FormatError(f"bad number {tok!r}", lineno, col) from None
        if len(out) != n:
            raise FormatError(f"expected {n} values, found {len(out)}", lineno)
        return out

    section(1, "R")
    R = np.array([numbers(2 + k) for k in range(n)])
    section(2 + n, "PSI")
    psi = np.array(numbers(3 + n))
    section(4 + n, "G")
    G = np.array([numbers(5 + n + k) for k in range(n)])
    return RGFactors(R, psi, G)
