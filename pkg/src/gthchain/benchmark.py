"""Accuracy of GTH against plain Gaussian elimination, scored by the exact oracle."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .errors import NumericalError, UnknownFamilyError
from .families import nearly_uncoupled, random_rational_chain, to_float
from .gth import gth_solve, naive_gaussian_solve
from .oracles import rational_solve_oracle


def max_relative_error(approx, exact) -> float:
    """max_j |approx_j - exact_j| / exact_j, evaluated exactly before rounding."""
    return max(float(abs(Fraction(float(a)) - e) / e) for a, e in zip(approx, exact))


@dataclass(frozen=True)
class BenchmarkRow:
    family: str
    N: int
    eps: Optional[float]
    gth_relerr: float
    ge_relerr: float
    gth_ms: float
    ge_ms: float
    ge_failure: str = ""


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, (time.perf_counter() - t0) * 1e3


def stability_benchmark(family: str, sizes, eps_values=(None,), seed=0, compensated=False) -> List[BenchmarkRow]:
    """Score both solvers on each (N, eps) instance of a rational family.

    ``family`` is ``"ncd"`` (nearly uncoupled, uses ``eps_values``) or
    ``"random"`` (dense random, seeded by ``seed + N``). A breakdown of the
    naive solver is recorded in the row, not raised.
    """
    if family not in ("ncd", "random"):
        raise UnknownFamilyError(f"no benchmark family {family!r}")
    rows = []
    for n in sizes:
        for eps in eps_values if family == "ncd" else (None,):
            rational = nearly_uncoupled(n, eps) if family == "ncd" else random_rational_chain(n, seed + n)
            exact = rational_solve_oracle(rational)
            p = to_float(rational)
            x, gth_ms = _timed(gth_solve, p, compensated)
            failure = ""
            try:
                y, ge_ms = _timed(naive_gaussian_solve, p)
                ge_err = max_relative_error(y, exact)
            except NumericalError as exc:
                ge_err, ge_ms, failure = float("nan"), 0.0, str(exc)
            rows.append(
                BenchmarkRow(
                    family, n, None if eps is None else float(eps),
                    max_relative_error(x, exact), ge_err, gth_ms, ge_ms, failure,
                )
            )
    return rows


def benchmark_csv(rows, timing=True) -> str:
    lines = ["family,N,eps,gth_relerr,ge_relerr,gth_ms,ge_ms"]
    for r in rows:
        eps = "" if r.eps is None else f"{r.eps:g}"
        t = (f"{r.gth_ms:.3f}", f"{r.ge_ms:.3f}") if timing else ("0", "0")
        lines.append(f"{r.family},{r.N},{eps},{r.gth_relerr:.12g},{r.ge_relerr:.12g},{t[0]},{t[1]}")
    return "\n".join(lines) + "\n"


def benchmark_json(rows, timing=True) -> str:
    out = []
    for r in rows:
        d = dict(r.__dict__)
        if not timing:
            d["gth_ms"] = d["ge_ms"] = 0.0
        out.append(d)
    return json.dumps(out, indent=2) + "\n"
