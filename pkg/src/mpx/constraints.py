"""Linear constraint systems over cycle, circulation and threshold variables.

Naming conventions:

* ``r@<path>`` -- free threshold of the expression node at ``<path>``
  (``e`` is the root, ``l``/``r`` descend left/right); ``nu`` is the
  overall threshold.
* ``X[<fam>]c<i>`` -- weight of simple cycle ``i`` in family ``<fam>``.
* ``x[<fam>]e<id>`` -- circulation on product edge ``<id>`` in family ``<fam>``.

A family is labelled by the dimension of its lim-sup atom, or ``inf`` for
the single family used when the expression has no lim-sup atom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .automata import ProductAutomaton, SccPartition, reachable_sccs
from .errors import InputError
from .expressions import ROOT, Atom, AtomVector, Expression, Min, Sum, is_max_free
from .numerics import LinearConstraint, LinearProgram, eq, ge

MULTI_CYCLE = "multi-cycle"
MIN_ONLY = "min-only"
STRUCTURAL = "structural"
CIRCULATION = "circulation"

NU = "nu"


@dataclass
class ConstraintSystem:
    variables: dict = field(default_factory=dict)  # name -> nonnegative?
    rows: list = field(default_factory=list)  # (LinearConstraint, tag)

    def declare(self, name, nonnegative):
        prev = self.variables.get(name)
        if prev is not None and prev != nonnegative:
            raise InputError(f"variable {name!r} redeclared with another sign")
        self.variables[name] = nonnegative

    def add(self, row: LinearConstraint, tag: str):
        self.rows.append((row, tag))

    def extend(self, other: "ConstraintSystem") -> "ConstraintSystem":
        for name, nonneg in other.variables.items():
            self.declare(name, nonneg)
        self.rows.extend(other.rows)
        return self

    @property
    def constraints(self):
        return [row for row, _ in self.rows]

    def tagged(self, tag):
        return [row for row, t in self.rows if t == tag]

    def to_lp(self, objective=None) -> LinearProgram:
        return LinearProgram(list(self.variables.items()), self.constraints, dict(objective or {}))

    def render(self) -> str:
        lines = []
        for name, nonneg in self.variables.items():
            lines.append(f"var {name} {'>= 0' if nonneg else 'free'}")
        for row, tag in self.rows:
            lines.append(f"row {tag}: {row.render()}")
        return "\n".join(lines)


class ThresholdVariables:
    """One free variable per node of a MAX-free expression plus ``nu``."""

    def __init__(self, e: Expression):
        if not is_max_free(e):
            raise InputError("contains-max")
        self.expression = e
        self.nodes = {}
        self._collect(e, ROOT)
        self.nu = NU

    def _collect(self, e, path):
        self.nodes[path] = e
        if not isinstance(e, Atom):
            self._collect(e.left, path + "l")
            self._collect(e.right, path + "r")

    def var(self, path) -> str:
        return f"r@{path}"

    def names(self):
        return [self.var(p) for p in self.nodes] + [self.nu]

    def declare_into(self, system: ConstraintSystem):
        for name in self.names():
            system.declare(name, False)

    def atom_thresholds(self, atoms: AtomVector) -> list:
        return [self.var(slot.path) for slot in atoms]


def _threshold_term(r):
    """Split a threshold into (terms to subtract, constant rhs)."""
    if isinstance(r, str):
        return {r: Fraction(-1)}, Fraction(0)
    return {}, Fraction(r)


def _declare_thresholds(system, r):
    for x in r:
        if isinstance(x, str):
            system.declare(x, False)


def families(atoms: AtomVector) -> list:
    """(label, constrained dims) per family.

    One family per lim-sup dimension, constraining every lim-inf dimension
    plus its own; a single ``inf`` family when there is no lim-sup atom.
    """
    if not atoms.sup_dims:
        return [("inf", atoms.inf_dims)]
    return [(str(i), atoms.inf_dims + [i]) for i in atoms.sup_dims]


def _cycle_rows(system, cycles, dims, r, prefix, tag):
    names = [f"{prefix}c{i}" for i in range(len(cycles))]
    for name in names:
        system.declare(name, True)
    for d in dims:
        terms, rhs = _threshold_term(r[d])
        for name, c in zip(names, cycles):
            if c.weight[d]:
                terms[name] = terms.get(name, 0) + c.weight[d]
        system.add(ge(terms, rhs), tag)
    system.add(eq({name: c.length for name, c in zip(names, cycles)}, 1), tag)


def multi_cycle_constraints(cycles, r, prefix="X") -> ConstraintSystem:
    """Cycle weights X_c >= 0 with sum X_c w(c) >= r and sum |c| X_c = 1."""
    if not cycles:
        raise InputError("no-cycles")
    system = ConstraintSystem()
    _declare_thresholds(system, r)
    _cycle_rows(system, cycles, range(len(r)), r, prefix, MULTI_CYCLE)
    return system


def min_only_constraints(atoms: AtomVector, cycles, r) -> ConstraintSystem:
    """Cycle-variable form: one multi-cycle family per lim-sup atom."""
    if not cycles:
        raise InputError("no-cycles")
    system = ConstraintSystem()
    _declare_thresholds(system, r)
    for label, dims in families(atoms):
        _cycle_rows(system, cycles, dims, r, f"X[{label}]", MIN_ONLY)
    return system


def circulation_constraints(p: ProductAutomaton, component: int, atoms: AtomVector, r,
                            scc: SccPartition | None = None) -> ConstraintSystem:
    """Edge-flow form of :func:`min_only_constraints` inside one component.

    Each family is a unit-mass circulation on the component's internal edges.
    """
    scc = scc or reachable_sccs(p)
    comp = scc.components[component]
    if not comp.has_cycle:
        raise InputError(f"component {component} has no cycle")
    system = ConstraintSystem()
    _declare_thresholds(system, r)
    for label, dims in families(atoms):
        prefix = f"x[{label}]"
        names = {eid: f"{prefix}e{eid}" for eid in comp.edges}
        for name in names.values():
            system.declare(name, True)
        for v in comp.vertices:
            terms = {}
            for eid, name in names.items():
                e = p.edges[eid]
                if e.src == v and e.dst == v:
                    continue
                if e.dst == v:
                    terms[name] = terms.get(name, 0) + 1
                elif e.src == v:
                    terms[name] = terms.get(name, 0) - 1
            if terms:
                system.add(eq(terms, 0), CIRCULATION)
        system.add(eq({name: 1 for name in names.values()}, 1), CIRCULATION)
        for d in dims:
            terms, rhs = _threshold_term(r[d])
            for eid, name in names.items():
                w = p.edges[eid].weight[d]
                if w:
                    terms[name] = w
            system.add(ge(terms, rhs), CIRCULATION)
    return system


def structural_constraints(e: Expression, tv: ThresholdVariables | None = None) -> ConstraintSystem:
    """Rows tying each node's threshold to its children, and the root to ``nu``."""
    tv = tv or ThresholdVariables(e)
    system = ConstraintSystem()
    tv.declare_into(system)
    for path, node in tv.nodes.items():
        if isinstance(node, Atom):
            continue
        me, left, right = tv.var(path), tv.var(path + "l"), tv.var(path + "r")
        if isinstance(node, Min):
            system.add(ge({left: 1, me: -1}), STRUCTURAL)
            system.add(ge({right: 1, me: -1}), STRUCTURAL)
        elif isinstance(node, Sum):
            system.add(ge({left: 1, right: 1, me: -1}), STRUCTURAL)
    system.add(ge({tv.var(ROOT): 1, tv.nu: -1}), STRUCTURAL)
    return system
