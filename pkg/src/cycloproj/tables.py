"""Loaders for the shipped ground-truth tables."""

from __future__ import annotations

import re
from fractions import Fraction
from functools import cache
from importlib import resources

from .errors import DataFileError
from .qz import AffineQZ
from .solutions import Solution6

_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?([a-z]?)")


def parse_affine(text: str) -> AffineQZ:
    """Parse expressions like '1/2+4x', '-2x', '5/6', 'x'."""
    s = text.replace(" ", "")
    pos = 0
    const = Fraction(0)
    coeffs: dict[str, Fraction] = {}
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise DataFileError(f"bad expression {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        num = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        var = m.group(3)
        if var:
            coeffs[var] = coeffs.get(var, Fraction(0)) + sign * num
        else:
            const += sign * num
        pos = m.end()
    return AffineQZ(const, coeffs)


def _read(name):
    try:
        return resources.files("cycloproj.data").joinpath(name).read_text()
    except FileNotFoundError as exc:
        raise DataFileError(f"missing data file {name}") from exc


@cache
def table1_families() -> tuple[Solution6, ...]:
    """The 45 positive-parameter families, in table order."""
    rows = []
    for line in _read("table1.tsv").splitlines():
        line = line.split("#", 1)[0].rstrip()
        if not line:
            continue
        cells = line.split("\t")
        if len(cells) != 6:
            raise DataFileError(f"table1 row with {len(cells)} cells: {line!r}")
        rows.append(Solution6([parse_affine(c) for c in cells]))
    if len(rows) != 45:
        raise DataFileError(f"table1 has {len(rows)} rows")
    return tuple(rows)


@cache
def theorem3_pairs() -> tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...]], ...]:
    """The two shipped maximal pairs, as (left, right) tuples."""
    lines = [
        line.strip()
        for line in _read("theorem3_pairs.txt").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    if len(lines) % 2:
        raise DataFileError("odd number of tuple lines")
    out = []
    for i in range(0, len(lines), 2):
        left = tuple(Fraction(v) for v in lines[i].split(","))
        right = tuple(Fraction(v) for v in lines[i + 1].split(","))
        if len(left) != len(right):
            raise DataFileError("pair tuples of unequal length")
        out.append((left, right))
    return tuple(out)
