"""Symbolic templates for vanishing sums of roots of unity.

The template language describes how a vanishing sum decomposes into the
basic full-prime relations: ``R5`` is 1 + z + ... + z^4 over the 5th roots,
``(R5:R3)`` subtracts a rotated R3 sharing one root, ``2R2`` is a formal sum
with multiplicity.  Grammar (whitespace and underscores ignored)::

    template := term ("+" term)*
    term     := [INT] atom
    atom     := "R" INT | "(" atom ":" termlist ")"
    termlist := term ("," term)*

A trailing ``*`` on a data-file line marks the entry as starred in the
shipped catalog tables; ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from importlib import resources

from .errors import DataFileError, ParseError

_SMALL_PRIMES = {2, 3, 5, 7, 11, 13, 17, 19, 23}


@dataclass(frozen=True)
class Atom:
    """R_p, or (R_p : parts) with parts a tuple of (count, Atom)."""

    base: int
    parts: tuple = ()

    def weight(self) -> int:
        return self.base + sum(c * (a.weight() - 2) for c, a in self.parts)

    def __str__(self):
        if not self.parts:
            return f"R{self.base}"
        inner = ",".join(
            (f"{c}{a}" if c > 1 else str(a)) for c, a in self.parts
        )
        return f"(R{self.base}:{inner})"

    def sort_key(self):
        return (-self.weight(), str(self))


@dataclass(frozen=True)
class Template:
    """Formal sum of atoms with multiplicities."""

    terms: tuple  # ((count, Atom), ...)

    def weight(self) -> int:
        return sum(c * a.weight() for c, a in self.terms)

    def atoms(self):
        """Flat list of atoms with repetition."""
        out = []
        for c, a in self.terms:
            out.extend([a] * c)
        return out

    def __str__(self):
        return "+".join(
            (f"{c}{a}" if c > 1 else str(a)) for c, a in self.terms
        )

    @staticmethod
    def from_atoms(atoms) -> "Template":
        counts: dict[Atom, int] = {}
        for a in atoms:
            counts[a] = counts.get(a, 0) + 1
        terms = tuple(
            (c, a) for a, c in sorted(counts.items(), key=lambda kv: kv[0].sort_key())
        )
        return Template(terms)


def _normalize(parts) -> tuple:
    counts: dict[Atom, int] = {}
    for c, a in parts:
        counts[a] = counts.get(a, 0) + c
    return tuple(
        (c, a) for a, c in sorted(counts.items(), key=lambda kv: kv[0].sort_key())
    )


class _Parser:
    def __init__(self, text: str):
        self.raw = text
        self.text = "".join(ch for ch in text if not ch.isspace() and ch != "_")
        self.pos = 0

    def error(self, msg):
        raise ParseError(f"{msg} in {self.raw!r}", self.pos)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def integer(self):
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected integer")
        return int(self.text[start : self.pos])

    def atom(self) -> Atom:
        if self.peek() == "R":
            self.pos += 1
            p = self.integer()
            if p not in _SMALL_PRIMES:
                self.error(f"R{p} is not a prime relation")
            return Atom(p)
        if self.peek() == "(":
            self.pos += 1
            base = self.atom()
            if base.parts:
                self.error("base of a colon construction must be a prime relation")
            self.take(":")
            parts = [self.term()]
            while self.peek() == ",":
                self.pos += 1
                parts.append(self.term())
            self.take(")")
            return Atom(base.base, _normalize(parts))
        self.error("expected 'R' or '('")

    def term(self):
        count = 1
        if self.peek().isdigit():
            count = self.integer()
            if count < 1:
                self.error("multiplicity must be positive")
        return (count, self.atom())

    def template(self) -> Template:
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        if self.pos != len(self.text):
            self.error("trailing characters")
        return Template(_normalize(terms))


def parse_template(text: str) -> Template:
    return _Parser(text).template()


def print_template(t: Template) -> str:
    return str(t)


@dataclass(frozen=True)
class CatalogEntry:
    template: Template | None
    starred: bool
    display: str = ""  # nonempty for raw multiset entries

    @property
    def is_raw(self):
        return bool(self.display)


def _load_lines(name: str):
    try:
        path = resources.files("cycloproj.data").joinpath(name)
        text = path.read_text()
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise DataFileError(f"missing data file {name}") from exc
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line


@cache
def load_catalog(name: str) -> tuple[CatalogEntry, ...]:
    """Parse a shipped template table; '*' suffix marks starred entries."""
    entries = []
    for line in _load_lines(name):
        starred = line.endswith("*")
        if starred:
            line = line[:-1].strip()
        if line.startswith("@"):
            entries.append(CatalogEntry(None, starred, display=line[1:]))
            continue
        try:
            tpl = parse_template(line)
        except ParseError as exc:
            raise DataFileError(f"{name}: {exc}") from exc
        entries.append(CatalogEntry(tpl, starred))
    if not entries:
        raise DataFileError(f"{name}: no entries")
    return tuple(entries)


@cache
def catalog_minimal_upto12() -> tuple[Template, ...]:
    """The minimal relations of weight up to 12 (shipped table)."""
    return tuple(e.template for e in load_catalog("lemma13.txt"))


def load_lemma_tables() -> dict[str, tuple[CatalogEntry, ...]]:
    return {
        name: load_catalog(f"{name}.txt")
        for name in ("lemma13", "lemma18", "lemma25", "lemma33", "lemma34")
    }


@cache
def catalog_atoms() -> frozenset[Atom]:
    """Atoms allowed as constituents: the weight-<=12 catalog plus R_p."""
    out = {Atom(p) for p in _SMALL_PRIMES}
    for t in catalog_minimal_upto12():
        for a in t.atoms():
            out.add(a)
    return frozenset(out)
