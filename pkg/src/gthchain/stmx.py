"""Plain-text matrix files (``.stmx``) and CSV vector output.

Layout: the first non-comment line is the state count N, followed by N
rows of N whitespace-separated numbers. ``#`` starts a comment. Tokens
of the form ``a/b`` make the whole matrix rational.
"""
from __future__ import annotations

import os
import tempfile
from fractions import Fraction

import numpy as np

from .core import as_stochastic
from .errors import FormatError


def parse_stmx(text: str):
    """Return the rows as lists of ``float`` (or ``Fraction`` if any token is ``a/b``)."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            lines.append((lineno, body))
    if not lines:
        raise FormatError("file holds no matrix")
    head_no, head = lines[0]
    try:
        n = int(head.strip())
    except ValueError:
        raise FormatError(f"expected the state count, got {head.strip()!r}", head_no, 1) from None
    if n < 1:
        raise FormatError("state count must be positive", head_no, 1)
    body = lines[1:]
    if len(body) != n:
        where = body[n][0] if len(body) > n else (body[-1][0] + 1 if body else head_no + 1)
        raise FormatError(f"expected {n} matrix rows, found {len(body)}", where)
    rational = any("/" in body_line for _, body_line in body)
    rows = []
    for lineno, line in body:
        toks = line.split()
        row = []
        for col, tok in enumerate(toks, 1):
            try:
                row.append(Fraction(tok) if rational else float(tok))
            except (ValueError, ZeroDivisionError):
                raise FormatError(f"bad number {tok!r}", lineno, col) from None
        if len(row) != n:
            raise FormatError(f"expected {n} entries, found {len(row)}", lineno, min(len(row), n) + 1)
        rows.append(row)
    return rows


def read_stmx(path, normalize=False) -> np.ndarray:
    """Read and validate a stochastic matrix from a ``.stmx`` file."""
    with open(path, encoding="utf-8") as fh:
        rows = parse_stmx(fh.read())
    return as_stochastic(np.array([[float(x) for x in r] for r in rows]), normalize=normalize)


def read_stmx_exact(path):
    with open(path, encoding="utf-8") as fh:
        rows = parse_stmx(fh.read())
    return [[x if isinstance(x, Fraction) else Fraction(x) for x in r] for r in rows]


def _token(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def format_stmx(m, comment=None) -> str:
    rows = m.tolist() if isinstance(m, np.ndarray) else m
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(str(len(rows)))
    out.extend(" ".join(_token(x) for x in row) for row in rows)
    return "\n".join(out) + "\n"


def format_vector_csv(values, labels=None) -> str:
    labels = range(1, len(values) + 1) if labels is None else labels
    lines = ["state,probability"]
    lines += [f"{k},{float(v):.12g}" for k, v in zip(labels, values)]
    return "\n".join(lines) + "\n"


def write_atomic(path, text: str):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
