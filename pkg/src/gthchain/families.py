"""Built-in chain families.

Countable families (``bd``, ``reset``) carry closed-form stationary
distributions. Finite families (``random``, ``ncd``, ``cycle``) are
generated with exact rational entries so the rational oracle can be
run against them; :func:`to_float` rounds them for the float solvers.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import CountableChainSpec
from .errors import UnknownFamilyError, ValidationError


def birth_death(p: float) -> CountableChainSpec:
    """Reflecting walk: up with probability p, down with 1 - p, holding 1 - p at state 1.

    Positive recurrent for p < 1/2 with pi_j = (1 - rho) rho^(j-1), rho = p / (1 - p).
    """
    if not 0 < p < 0.5:
        raise ValidationError(f"birth-death family needs 0 < p < 1/2, got {p}")
    q = 1.0 - p
    rho = p / q

    def kernel(i, j):
        if j == i + 1:
            return p
        if i == 1 and j == 1:
            return q
        if i > 1 and j == i - 1:
            return q
        return 0.0

    def support(i):
        return (1, 2) if i == 1 else (i - 1, i + 1)

    return CountableChainSpec(
        name=f"bd:p={p:g}",
        kernel=kernel,
        row_support=support,
        exact_stationary=lambda j: (1.0 - rho) * rho ** (j - 1),
        tail_mass=lambda n: rho**n,
        params={"p": p},
    )


def reset_walk(p: float, q: float) -> CountableChainSpec:
    """Walk that steps up (p), down (q) or jumps back to state 1 (1 - p - q).

    Unlike the birth-death walk it is not skip-free downward, so the
    censored truncation differs from the last-column augmentation. The
    stationary law is geometric, pi_j = (1 - z) z^(j-1), with z the
    smaller root of q z^2 - z + p = 0.
    """
    c = 1.0 - p - q
    if p <= 0 or q < 0 or c <= 0:
        raise ValidationError(f"reset family needs p > 0, q >= 0, p + q < 1; got p={p}, q={q}")
    z = p if q == 0 else (1.0 - math.sqrt(1.0 - 4.0 * p * q)) / (2.0 * q)

    def kernel(i, j):
        if j == i + 1:
            return p
        if i == 1:
            return 1.0 - p if j == 1 else 0.0
        if i == 2:
            return 1.0 - p if j == 1 else 0.0
        if j == i - 1:
            return q
        if j == 1:
            return c
        return 0.0

    def support(i):
        if i <= 2:
            return (1, i + 1) if i == 2 else (1, 2)
        return (1, i - 1, i + 1)

    return CountableChainSpec(
        name=f"reset:p={p:g},q={q:g}",
        kernel=kernel,
        row_support=support,
        exact_stationary=lambda j: (1.0 - z) * z ** (j - 1),
        tail_mass=lambda n: z**n,
        params={"p": p, "q": q},
    )


def _frac(x) -> Fraction:
    # str() keeps decimal literals such as 1e-8 exact
    return x if isinstance(x, Fraction) else Fraction(str(x))


def random_rational_chain(n: int, seed: int, density: float = 0.75, max_weight: int = 9):
    """Seeded irreducible chain with rational entries (list of rows of Fractions).

    Integer weights are drawn per entry; a cycle 1 -> 2 -> ... -> n -> 1 of
    positive weights guarantees irreducibility.
    """
    rng = np.random.default_rng(seed)
    w = rng.integers(1, max_weight + 1, size=(n, n))
    w[rng.random((n, n)) >= density] = 0
    for i in range(n):
        w[i, (i + 1) % n] = max(w[i, (i + 1) % n], 1)
    rows = []
    for i in range(n):
        total = int(w[i].sum())
        rows.append([Fraction(int(v), total) for v in w[i]])
    return rows


def random_chain(n: int, seed: int, density: float = 0.75) -> np.ndarray:
    return to_float(random_rational_chain(n, seed, density))


def nearly_uncoupled(n: int, eps) -> list:
    """Two weakly coupled blocks; every state leaks mass ``eps`` to the other block.

    Within-block and coupling weights follow fixed integer patterns so the
    stationary vector is not uniform. Returned with exact rational entries.
    """
    if n < 2:
        raise ValidationError("nearly-uncoupled family needs n >= 2")
    e = _frac(eps)
    if not 0 < e < 1:
        raise ValidationError(f"coupling must lie in (0, 1), got {eps}")
    a = (n + 1) // 2
    block = [0] * a + [1] * (n - a)
    rows = []
    for i in range(n):
        inside = [j for j in range(n) if block[j] == block[i]]
        outside = [j for j in range(n) if block[j] != block[i]]
        w_in = {j: 1 + (i + 2 * j) % 4 for j in inside}
        w_out = {j: 1 + (3 * i + j) % 3 for j in outside}
        s_in, s_out = sum(w_in.values()), sum(w_out.values())
        row = [Fraction(0)] * n
        for j, w in w_in.items():
            row[j] = (1 - e) * Fraction(w, s_in)
        for j, w in w_out.items():
            row[j] = e * Fraction(w, s_out)
        rows.append(row)
    return rows


def cycle(n: int) -> list:
    """Deterministic cyclic permutation i -> i + 1 (mod n)."""
    return [[Fraction(int(j == (i + 1) % n)) for j in range(n)] for i in range(n)]


def to_float(rows) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in rows], dtype=float)


def parse_family_id(text: str):
    """Split ``"bd:p=0.3"`` into ``("bd", {"p": "0.3"})``."""
    name, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise UnknownFamilyError(f"bad family parameter {item!r} in {text!r}")
        params[key.strip()] = value.strip()
    return name.strip().lower(), params


COUNTABLE = ("bd", "reset")
FINITE = ("random", "ncd", "cycle")


def countable_family(text: str) -> CountableChainSpec:
    name, params = parse_family_id(text)
    try:
        if name == "bd":
            return birth_death(float(params["p"]))
        if name == "reset":
            return reset_walk(float(params["p"]), float(params["q"]))
    except KeyError as exc:
        raise UnknownFamilyError(f"family {text!r} is missing parameter {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise UnknownFamilyError(f"bad parameter value in {text!r}: {exc}") from None
    raise UnknownFamilyError(f"unknown countable family {text!r}")


def finite_family(text: str, seed: int = 0):
    """Rational rows for a finite family id such as ``random:n=6`` or ``ncd:n=4,eps=1e-8``."""
    name, params = parse_family_id(text)
    try:
        if name == "random":
            return random_rational_chain(int(params["n"]), seed, float(params.get("density", 0.75)))
        if name == "ncd":
            return nearly_uncoupled(int(params["n"]), params["eps"])
        if name == "cycle":
            return cycle(int(params["n"]))
    except KeyError as exc:
        raise UnknownFamilyError(f"family {text!r} is missing parameter {exc}") from None
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise UnknownFamilyError(f"bad parameter value in {text!r}: {exc}") from None
    raise UnknownFamilyError(f"unknown finite family {text!r}")
