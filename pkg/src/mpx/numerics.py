"""Exact rational arithmetic and a two-phase primal simplex over rationals.

Rationals are :class:`fractions.Fraction` values; nothing in this package
ever touches floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InputError

Rational = Fraction

GE = ">="
EQ = "="

INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
OPTIMAL = "Optimal"

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


def make_rational(num: int, den: int = 1) -> Fraction:
    if den == 0:
        raise InputError("zero-denominator")
    return Fraction(num, den)


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or ``p`` into a canonical rational."""
    m = _RATIONAL_RE.match(str(text))
    if not m:
        raise InputError(f"malformed rational {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    return make_rational(num, den)


def format_rational(value) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass
class LinearConstraint:
    """``sum(coef * var) REL rhs`` with REL one of ``>=`` or ``=``."""

    terms: dict
    relation: str = GE
    rhs: Fraction = Fraction(0)

    def __post_init__(self):
        if self.relation not in (GE, EQ):
            raise ValueError(f"unsupported relation {self.relation!r}")
        self.terms = {v: Fraction(c) for v, c in self.terms.items() if c != 0}
        self.rhs = Fraction(self.rhs)

    def lhs(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return sum((c * assignment.get(v, 0) for v, c in self.terms.items()), Fraction(0))

    def satisfied_by(self, assignment: Mapping[str, Fraction]) -> bool:
        value = self.lhs(assignment)
        return value == self.rhs if self.relation == EQ else value >= self.rhs

    def render(self) -> str:
        parts = []
        for var, coef in self.terms.items():
            sign = "-" if coef < 0 else "+"
            parts.append(f"{sign}{format_rational(abs(coef))} {var}")
        body = " ".join(parts) if parts else "0"
        return f"{body} {self.relation} {format_rational(self.rhs)}"


def ge(terms, rhs=0) -> LinearConstraint:
    return LinearConstraint(dict(terms), GE, rhs)


def le(terms, rhs=0) -> LinearConstraint:
    return LinearConstraint({v: -Fraction(c) for v, c in dict(terms).items()}, GE, -Fraction(rhs))


def eq(terms, rhs=0) -> LinearConstraint:
    return LinearConstraint(dict(terms), EQ, rhs)


@dataclass
class LinearProgram:
    """Maximize ``objective`` subject to ``constraints``.

    ``variables`` is a list of ``(name, nonnegative)`` pairs; ``nonnegative``
    False declares a free variable.
    """

    variables: list
    constraints: list
    objective: dict = field(default_factory=dict)

    def __post_init__(self):
        declared = set()
        for name, _ in self.variables:
            if name in declared:
                raise InputError(f"variable {name!r} declared twice")
            declared.add(name)
        for row in self.constraints:
            for var in row.terms:
                if var not in declared:
                    raise InputError(f"undeclared variable {var!r}")
        for var in self.objective:
            if var not in declared:
                raise InputError(f"undeclared objective variable {var!r}")


@dataclass
class LpOutcome:
    status: str
    value: Fraction | None = None
    assignment: dict | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Sparse simplex tableau; rows are dicts column -> coefficient."""

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.cost = {}
        self.value = Fraction(0)

    def pivot(self, r, q):
        row = self.rows[r]
        a = row[q]
        if a != 1:
            inv = 1 / a
            for col in row:
                row[col] *= inv
            self.rhs[r] *= inv
        b_r = self.rhs[r]
        items = list(row.items())
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(q)
            if f is None:
                continue
            for col, val in items:
                nv = other.get(col, 0) - f * val
                if nv:
                    other[col] = nv
                else:
                    other.pop(col, None)
            self.rhs[i] -= f * b_r
        f = self.cost.get(q)
        if f is not None:
            for col, val in items:
                nv = self.cost.get(col, 0) - f * val
                if nv:
                    self.cost[col] = nv
                else:
                    self.cost.pop(col, None)
            self.value += f * b_r
        self.basis[r] = q

    def run(self, allowed):
        """Bland's rule: lowest entering index, ties on leaving broken by lowest basic index."""
        while True:
            entering = None
            for col, c in self.cost.items():
                if c > 0 and col in allowed and (entering is None or col < entering):
                    entering = col
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                if best is None or ratio < best[0] or (ratio == best[0] and self.basis[i] < self.basis[best[1]]):
                    best = (ratio, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Exact two-phase primal simplex.

    Free variables are split into a difference of nonnegative columns.
    Optimal assignments are basic feasible solutions.
    """
    columns = []  # (variable name, sign)
    col_of = {}
    for name, nonneg in lp.variables:
        col_of[name] = [(len(columns), 1)]
        columns.append((name, 1))
        if not nonneg:
            col_of[name].append((len(columns), -1))
            columns.append((name, -1))
    n_struct = len(columns)

    rows, rhs = [], []
    next_col = n_struct
    for con in lp.constraints:
        row = {}
        for var, coef in con.terms.items():
            for col, sign in col_of[var]:
                row[col] = coef * sign
        if con.relation == GE:
            row[next_col] = Fraction(-1)
            next_col += 1
        b = con.rhs
        if b < 0:
            row = {c: -v for c, v in row.items()}
            b = -b
        rows.append(row)
        rhs.append(b)
    n_real = next_col

    artificial = list(range(n_real, n_real + len(rows)))
    for row, a in zip(rows, artificial):
        row[a] = Fraction(1)
    tab = _Tableau(rows, rhs, list(artificial))

    # phase 1: maximize -(sum of artificials)
    cost = {}
    for row in rows:
        for col, val in row.items():
            if col < n_real:
                cost[col] = cost.get(col, 0) + val
    tab.cost = {c: v for c, v in cost.items() if v}
    tab.value = -sum(rhs, Fraction(0))
    real_cols = range(n_real)
    tab.run(real_cols)
    if tab.value != 0:
        return LpOutcome(INFEASIBLE)

    # drive zero-level artificials out of the basis, dropping redundant rows
    art_set = set(artificial)
    keep = []
    for i in range(len(tab.rows)):
        if tab.basis[i] in art_set:
            cand = [c for c in tab.rows[i] if c < n_real]
            if cand:
                tab.pivot(i, min(cand))
                keep.append(i)
        else:
            keep.append(i)
    tab.rows = [{c: v for c, v in tab.rows[i].items() if c < n_real} for i in keep]
    tab.rhs = [tab.rhs[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]

    # phase 2
    cost = {}
    for var, coef in lp.objective.items():
        for col, sign in col_of[var]:
            cost[col] = Fraction(coef) * sign
    tab.value = Fraction(0)
    for i, b in enumerate(tab.basis):
        cb = cost.get(b)
        if not cb:
            continue
        for col, val in tab.rows[i].items():
            cost[col] = cost.get(col, 0) - cb * val
        tab.value += cb * tab.rhs[i]
    tab.cost = {c: v for c, v in cost.items() if v}
    status = tab.run(real_cols)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED)

    col_value = {b: tab.rhs[i] for i, b in enumerate(tab.basis)}
    assignment = {name: Fraction(0) for name, _ in lp.variables}
    for col in range(n_struct):
        v = col_value.get(col)
        if v:
            name, sign = columns[col]
            assignment[name] += sign * v
    return LpOutcome(OPTIMAL, tab.value, assignment)


def check_feasible(constraints: Sequence[LinearConstraint], variables) -> bool:
    """True iff the constraints admit a rational solution."""
    return solve_lp(LinearProgram(list(variables), list(constraints))).status != INFEASIBLE
