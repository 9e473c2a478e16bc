"""Maximum value, decision problems, lasso evaluation and witness schedules.

The maximum value of a MAX-free expression is the largest ``nu`` for which
the circulation constraints of some cyclic SCC, together with the
structural threshold rows, are feasible. It is found by one exact LP per
SCC. General expressions are split into MAX-free pieces first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice

from .automata import (
    DEFAULT_CYCLE_CAP,
    ProductAutomaton,
    SccPartition,
    build_product,
    make_cycle,
    reachable_sccs,
    shortest_path,
)
from .constraints import (
    ConstraintSystem,
    ThresholdVariables,
    circulation_constraints,
    families,
    structural_constraints,
)
from .errors import InputError, MpxError
from .expressions import (
    DEFAULT_PIECE_CAP,
    Atom,
    AtomVector,
    Expression,
    Max,
    Min,
    Sum,
    alphabet_of,
    atom_vector,
    complement,
    is_max_free,
    split_max,
)
from .numerics import OPTIMAL, solve_lp

DEFAULT_EPSILON = Fraction(1, 100)


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``u v v v ...``."""

    u: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "v", tuple(self.v))
        if not self.v:
            raise InputError("lasso loop must be nonempty")

    def prefix(self, n):
        out = list(self.u[:n])
        while len(out) < n:
            out.extend(self.v[: n - len(out)])
        return out


@dataclass
class PieceOptimum:
    """Optimum of one MAX-free expression, attributed to an SCC of its product."""

    value: Fraction
    scc: int
    expression: Expression
    atoms: AtomVector
    product: ProductAutomaton
    partition: SccPartition
    assignment: dict
    thresholds: ThresholdVariables

    def threshold(self, dim):
        return self.assignment[self.thresholds.var(self.atoms.slots[dim].path)]


@dataclass
class Verdict:
    """Answer of a query; ``answer`` is None for pure value computations."""

    answer: bool | None
    value: Fraction
    piece: int
    scc: int
    optimum: PieceOptimum | None = field(default=None, repr=False)
    schedule: "WitnessSchedule | None" = field(default=None, repr=False)


def piece_system(e: Expression, atoms: AtomVector, p: ProductAutomaton, partition: SccPartition,
                 component: int, tv: ThresholdVariables) -> ConstraintSystem:
    """Circulation plus structural constraints of one MAX-free piece on one SCC."""
    system = ConstraintSystem()
    system.extend(structural_constraints(e, tv))
    system.extend(circulation_constraints(p, component, atoms, tv.atom_thresholds(atoms), partition))
    return system


def max_value_max_free(e: Expression, *, oracle: bool = False,
                       cycle_cap: int = DEFAULT_CYCLE_CAP) -> PieceOptimum:
    """Exact maximum of a MAX-free expression over all infinite words.

    With ``oracle`` the exponential cycle-enumeration form is used instead
    of circulations.
    """
    if not is_max_free(e):
        raise InputError("contains-max")
    if oracle:
        from .oracles import cycle_enum_optimum

        return cycle_enum_optimum(e, cycle_cap=cycle_cap)
    atoms = atom_vector(e)
    p = build_product(atoms.product_atoms())
    partition = reachable_sccs(p)
    tv = ThresholdVariables(e)
    best = None
    for comp in partition.cyclic():
        system = piece_system(e, atoms, p, partition, comp.id, tv)
        outcome = solve_lp(system.to_lp({tv.nu: 1}))
        if outcome.status != OPTIMAL:
            raise MpxError(f"unexpected LP status {outcome.status} on SCC {comp.id}")
        if best is None or outcome.value > best.value:
            best = PieceOptimum(outcome.value, comp.id, e, atoms, p, partition, outcome.assignment, tv)
    return best


def max_value(e: Expression, *, oracle: bool = False, cycle_cap: int = DEFAULT_CYCLE_CAP,
              piece_cap: int = DEFAULT_PIECE_CAP) -> Verdict:
    """Maximum over MAX-free pieces; ties go to the lowest piece index."""
    best, best_index = None, None
    for i, piece in enumerate(split_max(e, piece_cap)):
        opt = max_value_max_free(piece, oracle=oracle, cycle_cap=cycle_cap)
        if best is None or opt.value > best.value:
            best, best_index = opt, i
    return Verdict(None, best.value, best_index, best.scc, best)


def is_empty(e: Expression, nu, **kw) -> Verdict:
    """Emptiness query for the cut-point language of ``e`` at ``nu``.

    ``answer`` is True when the language is *nonempty*, i.e. some word has
    value at least ``nu``.
    """
    v = max_value(e, **kw)
    v.answer = v.value >= Fraction(nu)
    return v


def is_universal(e: Expression, nu, **kw) -> Verdict:
    """True iff every word has value at least ``nu``; ``value`` is the minimum."""
    v = max_value(complement(e), **kw)
    v.value = -v.value
    v.answer = v.value >= Fraction(nu)
    return v


def includes(e1: Expression, e2: Expression, **kw) -> Verdict:
    """True iff ``e1(w) <= e2(w)`` for every word; ``value`` is ``max(e1 - e2)``."""
    alphabet_of(Sum(e1, e2))
    v = max_value(Sum(e1, complement(e2)), **kw)
    v.answer = v.value <= 0
    return v


def distance_expression(e1: Expression, e2: Expression) -> Expression:
    return Max(Sum(e1, complement(e2)), Sum(e2, complement(e1)))


def distance(e1: Expression, e2: Expression, **kw) -> Fraction:
    alphabet_of(Sum(e1, e2))
    return max_value(distance_expression(e1, e2), **kw).value


def equivalent(e1: Expression, e2: Expression, **kw) -> Verdict:
    alphabet_of(Sum(e1, e2))
    v = max_value(distance_expression(e1, e2), **kw)
    v.answer = v.value == 0
    return v


# -- lasso evaluation ---------------------------------------------------------

def atom_on_lasso(automaton, w: LassoWord) -> Fraction:
    """Long-run average of one automaton on ``u v^omega`` (liminf = limsup here)."""
    q = automaton.initial
    for s in w.u:
        q = automaton.step(q, s)[0]
    seen = {}
    sums = []
    while q not in seen:
        seen[q] = len(sums)
        total = Fraction(0)
        for s in w.v:
            q, wt = automaton.step(q, s)
            total += wt
        sums.append(total)
    loop = sums[seen[q]:]
    return sum(loop, Fraction(0)) / (len(loop) * len(w.v))


def evaluate_lasso(e: Expression, w: LassoWord) -> Fraction:
    if isinstance(e, Atom):
        return atom_on_lasso(e.automaton, w)
    left, right = evaluate_lasso(e.left, w), evaluate_lasso(e.right, w)
    if isinstance(e, Min):
        return min(left, right)
    if isinstance(e, Max):
        return max(left, right)
    return left + right


# -- witness schedules --------------------------------------------------------

@dataclass(frozen=True)
class Family:
    """A multi-cycle: (cycle, multiplicity) pairs from one optimal circulation."""

    label: str
    sup_dim: int | None
    cycles: tuple

    @property
    def base(self):
        return self.cycles[0][0].start


@dataclass(frozen=True)
class WitnessSchedule:
    """Finite description of an infinite word reaching the optimum up to epsilon.

    With a single family the word is ``access``, then rounds ``l = 1, 2, ...``
    in which every cycle of the multi-cycle is repeated ``l * multiplicity``
    times, joined by shortest paths inside the SCC. With several lim-sup
    families the word runs in phases: phase ``t`` restarts the rounds of
    family ``(t - 1) mod n`` and lasts at least ``t * K`` steps and until that
    family's lim-sup dimension has running average at least its threshold
    minus epsilon.
    """

    product: ProductAutomaton
    component: tuple
    access: tuple
    families: tuple
    thresholds: tuple
    epsilon: Fraction
    value: Fraction

    def connect(self, u, v):
        return shortest_path(self.product, u, v, within=set(self.component))


def decompose_circulation(p: ProductAutomaton, flow: dict) -> list:
    """Split an edge circulation into (SimpleCycle, amount) pairs, deterministically."""
    remaining = {e: x for e, x in flow.items() if x > 0}
    found = {}
    while remaining:
        e0 = min(remaining)
        walk = [e0]
        seen = {p.edges[e0].src: 0}
        v = p.edges[e0].dst
        while v not in seen:
            seen[v] = len(walk)
            e = min(eid for eid in remaining if p.edges[eid].src == v)
            walk.append(e)
            v = p.edges[e].dst
        loop = walk[seen[v]:]
        amount = min(remaining[e] for e in loop)
        for e in loop:
            remaining[e] -= amount
            if remaining[e] == 0:
                del remaining[e]
        cyc = make_cycle(p, loop)
        found[cyc.edges] = (cyc, found.get(cyc.edges, (cyc, 0))[1] + amount)
    return [found[k] for k in sorted(found)]


def _multiplicities(amounts):
    lcd = math.lcm(*(a.denominator for a in amounts))
    ints = [int(a * lcd) for a in amounts]
    g = math.gcd(*ints)
    return [i // g for i in ints]


def witness_schedule(e: Expression, epsilon=DEFAULT_EPSILON,
                     optimum: PieceOptimum | None = None) -> WitnessSchedule:
    """Schedule for a MAX-free expression built from its optimal LP solution."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    opt = optimum or max_value_max_free(e)
    p, atoms = opt.product, opt.atoms
    fams = []
    for label, dims in families(atoms):
        prefix = f"x[{label}]e"
        flow = {int(name[len(prefix):]): val for name, val in opt.assignment.items()
                if name.startswith(prefix) and val > 0}
        if not flow:
            raise MpxError("zero-support circulation")
        parts = decompose_circulation(p, flow)
        mult = _multiplicities([a for _, a in parts])
        sup_dim = None if label == "inf" else int(label)
        fams.append(Family(label, sup_dim, tuple((c, m) for (c, _), m in zip(parts, mult))))
    comp = opt.partition.components[opt.scc]
    access = tuple(shortest_path(p, p.initial, fams[0].base))
    thresholds = tuple(opt.threshold(d) for d in range(len(atoms)))
    return WitnessSchedule(p, comp.vertices, access, tuple(fams), thresholds, epsilon, opt.value)


def _rounds(s: WitnessSchedule, fam: Family, start: int, paths: dict):
    """Edge ids of a family's rounds, starting at vertex ``start``; infinite."""
    v = start
    level = 1
    while True:
        for cyc, m in fam.cycles:
            key = (v, cyc.start)
            if key not in paths:
                paths[key] = s.connect(*key)
            yield from paths[key]
            for _ in range(level * m):
                yield from cyc.edges
            v = cyc.start
        level += 1


def walk_edges(s: WitnessSchedule):
    """Infinite generator of product edge ids along the scheduled word."""
    p = s.product
    paths = {}
    yield from s.access
    v = s.families[0].base
    if len(s.families) == 1:
        yield from _rounds(s, s.families[0], v, paths)
        return
    totals = [Fraction(0)] * p.dimension
    steps = len(s.access)
    for eid in s.access:
        for d, w in enumerate(p.edges[eid].weight):
            totals[d] += w
    first_round = [sum(c.length * m for c, m in f.cycles) for f in s.families]
    phase = 0
    while True:
        phase += 1
        fi = (phase - 1) % len(s.families)
        fam = s.families[fi]
        dim = fam.sup_dim
        target = s.thresholds[dim] - s.epsilon
        min_len = phase * (first_round[fi] + len(s.component))
        count = 0
        for eid in _rounds(s, fam, v, paths):
            yield eid
            edge = p.edges[eid]
            for d, w in enumerate(edge.weight):
                totals[d] += w
            steps += 1
            count += 1
            v = edge.dst
            if count >= min_len and totals[dim] >= target * steps:
                break


def emit_prefix(s: WitnessSchedule, n: int) -> list:
    """First ``n`` symbols of the scheduled word."""
    if n < 1:
        raise InputError("prefix length must be positive")
    p = s.product
    return [p.edges[eid].symbol for eid in islice(walk_edges(s), n)]


def witness(e: Expression, epsilon=DEFAULT_EPSILON, **kw) -> Verdict:
    """Maximum value of ``e`` plus a schedule for the winning MAX-free piece."""
    v = max_value(e, **kw)
    piece = split_max(e, kw.get("piece_cap", DEFAULT_PIECE_CAP))[v.piece]
    # oracle optima carry cycle variables, not the circulation the schedule needs
    opt = None if kw.get("oracle") else v.optimum
    v.schedule = witness_schedule(piece, epsilon, opt)
    return v
