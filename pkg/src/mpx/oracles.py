"""Brute-force oracles and fixture generators used to cross-check the engine.

``cycle_enum_max_value`` is the naive exponential route: enumerate every
simple cycle of every cyclic SCC and solve the cycle-variable LP. The DFA
gadgets turn regular-language intersection / union questions into
expression emptiness / universality questions.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .automata import (
    DEFAULT_CYCLE_CAP,
    INF,
    SUP,
    WeightedAutomaton,
    build_product,
    enumerate_simple_cycles,
    reachable_sccs,
)
from .constraints import ThresholdVariables, min_only_constraints, structural_constraints
from .errors import InputError, MpxError, ParseError
from .expressions import Atom, Expression, Max, Min, Sum, atom_vector, is_max_free
from .numerics import OPTIMAL, solve_lp


def cycle_enum_optimum(e: Expression, cycle_cap: int = DEFAULT_CYCLE_CAP):
    from .engine import PieceOptimum

    if not is_max_free(e):
        raise InputError("contains-max")
    atoms = atom_vector(e)
    p = build_product(atoms.product_atoms())
    partition = reachable_sccs(p)
    tv = ThresholdVariables(e)
    best = None
    for comp in partition.cyclic():
        cycles = enumerate_simple_cycles(p, comp.id, cap=cycle_cap, scc=partition)
        system = structural_constraints(e, tv)
        system.extend(min_only_constraints(atoms, cycles, tv.atom_thresholds(atoms)))
        outcome = solve_lp(system.to_lp({tv.nu: 1}))
        if outcome.status != OPTIMAL:
            raise MpxError(f"unexpected LP status {outcome.status} on SCC {comp.id}")
        if best is None or outcome.value > best.value:
            best = PieceOptimum(outcome.value, comp.id, e, atoms, p, partition, outcome.assignment, tv)
    return best


def cycle_enum_max_value(e: Expression, cycle_cap: int = DEFAULT_CYCLE_CAP) -> Fraction:
    return cycle_enum_optimum(e, cycle_cap).value


# -- DFAs and hardness gadgets ------------------------------------------------

@dataclass(frozen=True)
class Dfa:
    alphabet: tuple
    states: tuple
    initial: str
    accepting: frozenset
    transitions: dict  # (state, symbol) -> state

    def __post_init__(self):
        for q in self.states:
            for a in self.alphabet:
                if self.transitions.get((q, a)) not in self.states:
                    raise InputError(f"dfa: missing or bad transition for ({q}, {a})")
        if self.initial not in self.states or not set(self.accepting) <= set(self.states):
            raise InputError("dfa: initial/accepting states must be states")

    def __hash__(self):
        return hash((self.alphabet, self.states, self.initial, self.accepting))

    def accepts(self, word) -> bool:
        q = self.initial
        for s in word:
            q = self.transitions[(q, s)]
        return q in self.accepting


def parse_dfa(text: str, source=None) -> Dfa:
    """Automaton text format with ``accepting q...`` and weightless ``trans SRC SYM DST``."""
    fields = {}
    trans = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        if head == "trans":
            if len(args) != 3:
                raise ParseError("'trans' expects SRC SYMBOL DST", lineno, 1, source)
            trans[(args[0], args[1])] = args[2]
        elif head in ("dfa", "automaton", "alphabet", "states", "initial", "accepting"):
            fields[head] = args
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, 1, source)
    try:
        return Dfa(tuple(fields["alphabet"]), tuple(fields["states"]), fields["initial"][0],
                   frozenset(fields.get("accepting", ())), trans)
    except KeyError as exc:
        raise ParseError(f"missing '{exc.args[0]}' directive", None, None, source) from None


def gadget_f(d: Dfa, xi: str, name: str = "F") -> WeightedAutomaton:
    """Lim-inf value +1 on words ``x xi ...`` with ``x`` accepted by ``d``, else -1."""
    if xi in d.alphabet:
        raise InputError(f"symbol {xi!r} already in the DFA alphabet")
    alphabet = tuple(d.alphabet) + (xi,)
    top, bottom = "+sink", "-sink"
    trans = {}
    for q in d.states:
        for a in d.alphabet:
            trans[(q, a)] = (d.transitions[(q, a)], -1)
        trans[(q, xi)] = (top, 1) if q in d.accepting else (bottom, -1)
    for a in alphabet:
        trans[(top, a)] = (top, 1)
        trans[(bottom, a)] = (bottom, -1)
    return WeightedAutomaton(name, alphabet, tuple(d.states) + (top, bottom), d.initial, trans)


def gadget_g(alphabet, xi: str, name: str = "G") -> WeightedAutomaton:
    """Lim-inf value +1 on words without ``xi``, -1 on words containing it."""
    if xi in alphabet:
        raise InputError(f"symbol {xi!r} already in the alphabet")
    full = tuple(alphabet) + (xi,)
    trans = {("ok", a): ("ok", 1) for a in alphabet}
    trans[("ok", xi)] = ("bad", -1)
    trans.update({("bad", a): ("bad", -1) for a in full})
    return WeightedAutomaton(name, full, ("ok", "bad"), "ok", trans)


def intersection_nonempty(dfas) -> bool:
    """Textbook product reachability: does some finite word reach all-accepting?"""
    alphabet = dfas[0].alphabet
    start = tuple(d.initial for d in dfas)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if all(q in d.accepting for q, d in zip(v, dfas)):
            return True
        for a in alphabet:
            w = tuple(d.transitions[(q, a)] for q, d in zip(v, dfas))
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return False


def union_universal(dfas) -> bool:
    """Does every finite word lie in some DFA's language?"""
    alphabet = dfas[0].alphabet
    start = tuple(d.initial for d in dfas)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if not any(q in d.accepting for q, d in zip(v, dfas)):
            return False
        for a in alphabet:
            w = tuple(d.transitions[(q, a)] for q, d in zip(v, dfas))
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return True


def random_dfa(rng: random.Random, alphabet=("a", "b"), max_states=3) -> Dfa:
    n = rng.randint(1, max_states)
    states = tuple(f"d{i}" for i in range(n))
    trans = {(q, a): rng.choice(states) for q in states for a in alphabet}
    accepting = frozenset(q for q in states if rng.random() < 0.5)
    return Dfa(tuple(alphabet), states, states[0], accepting, trans)


# -- random instances ---------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    max_states: int = 4
    max_atoms: int = 4
    min_weight: int = -2
    max_weight: int = 2
    alphabet: tuple = ("a", "b")
    max_free: bool = False


def random_automaton(rng: random.Random, name: str, bounds: Bounds = Bounds()) -> WeightedAutomaton:
    n = rng.randint(1, bounds.max_states)
    states = tuple(f"q{i}" for i in range(n))
    trans = {
        (q, a): (rng.choice(states), rng.randint(bounds.min_weight, bounds.max_weight))
        for q in states
        for a in bounds.alphabet
    }
    return WeightedAutomaton(name, bounds.alphabet, states, states[0], trans)


def random_expression(rng: random.Random, automata, n_atoms: int, max_free: bool = False,
                      kinds=(INF, SUP)) -> Expression:
    if n_atoms == 1:
        return Atom(rng.choice(kinds), rng.choice(automata))
    k = rng.randint(1, n_atoms - 1)
    ops = (Min, Sum) if max_free else (Min, Max, Sum)
    op = rng.choice(ops)
    return op(random_expression(rng, automata, k, max_free, kinds),
              random_expression(rng, automata, n_atoms - k, max_free, kinds))


def random_instance(seed, bounds: Bounds = Bounds()):
    """Reproducible (automata, expression) pair; atoms may share automata."""
    rng = random.Random(seed)
    n_atoms = rng.randint(1, bounds.max_atoms)
    n_automata = rng.randint(1, n_atoms)
    automata = [random_automaton(rng, f"A{i + 1}", bounds) for i in range(n_automata)]
    e = random_expression(rng, automata, n_atoms, bounds.max_free)
    return automata, e


def product_size(e: Expression) -> int:
    return len(build_product(atom_vector(e).product_atoms()).vertices)
