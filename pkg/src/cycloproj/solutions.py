"""Solution tuples: six Q/Z coordinates, possibly affine in free variables.

A ``Solution6`` holds the additive coordinates [s1, s2, s3, t1, t2, t3] of a
projective-equivalence witness (1,s1,s2,s3) ~ (1,t1,t2,t3).  Coordinates are
``AffineQZ``; zero free variables means a concrete solution.  Degeneracy
(coincident points on either side) is what ``recover`` paths filter on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import DegenerateFamily
from .qz import AffineQZ, affine_vector, qz

PARAM_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class Solution6:
    coords: tuple

    def __init__(self, coords):
        object.__setattr__(self, "coords", affine_vector(coords))
        if len(self.coords) != 6:
            raise ValueError("need exactly six coordinates")

    @property
    def variables(self) -> tuple:
        seen = []
        for c in self.coords:
            for v in c.variables:
                if v not in seen:
                    seen.append(v)
        return tuple(seen)

    @property
    def nparams(self) -> int:
        return len(self.variables)

    @property
    def is_concrete(self) -> bool:
        return self.nparams == 0

    def concrete_values(self) -> tuple[Fraction, ...]:
        if not self.is_concrete:
            raise ValueError("solution has free parameters")
        return tuple(c.const for c in self.coords)

    def conductor(self) -> int:
        return lcm(*(c.const.denominator for c in self.coords)) if self.is_concrete else 0

    def specialize(self, assignment) -> "Solution6":
        return Solution6([c.substitute(assignment) for c in self.coords])

    def evaluate(self, assignment) -> tuple[Fraction, ...]:
        return tuple(c.evaluate(assignment) for c in self.coords)

    def rename_params(self) -> "Solution6":
        """Canonical variable names x, y, z in order of first appearance."""
        mapping = {v: PARAM_NAMES[i] for i, v in enumerate(self.variables)}
        return Solution6([c.rename(mapping) for c in self.coords])

    def degeneracy_ok(self) -> bool:
        """False when some required-distinct pair coincides identically."""
        s = (AffineQZ(0),) + self.coords[:3]
        t = (AffineQZ(0),) + self.coords[3:]
        for side in (s, t):
            for i in range(4):
                for j in range(i + 1, 4):
                    if side[i] == side[j]:
                        return False
        return True

    def is_degenerate_at(self, assignment) -> bool:
        vals = self.evaluate(assignment)
        s = (Fraction(0),) + vals[:3]
        t = (Fraction(0),) + vals[3:]
        return len(set(s)) != 4 or len(set(t)) != 4

    def __repr__(self):
        return "[" + ", ".join(str(c) for c in self.coords) + "]"

    def key(self):
        return tuple(c.key() for c in self.coords)


def concrete_solution(values) -> Solution6:
    return Solution6([AffineQZ(qz(Fraction(v))) for v in values])


def nondegenerate_specializations(sol: Solution6, grid: int, limit=None):
    """Concrete members of a parametric family over the (1/grid)-lattice."""
    from itertools import product

    vs = sol.variables
    if not vs:
        if not sol.is_degenerate_at({}):
            yield sol.concrete_values()
        return
    count = 0
    for point in product(range(grid), repeat=len(vs)):
        assignment = {v: Fraction(k, grid) for v, k in zip(vs, point)}
        if not sol.is_degenerate_at(assignment):
            yield sol.evaluate(assignment)
            count += 1
            if limit and count >= limit:
                return


def some_nondegenerate_specialization(sol: Solution6, grids=(101, 103, 107)):
    for grid in grids:
        for vals in nondegenerate_specializations(sol, grid, limit=1):
            return vals
    raise DegenerateFamily(f"no nondegenerate specialization found: {sol}")
