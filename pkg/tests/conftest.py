import itertools
from fractions import Fraction
from pathlib import Path

import pytest

from mpx.automata import WeightedAutomaton

DEMO = Path(__file__).resolve().parent.parent / "demo"


def automaton(name, states, trans, alphabet=("a", "b"), initial=None):
    return WeightedAutomaton(name, alphabet, states, initial or states[0], trans)


@pytest.fixture
def A1():
    return automaton("A1", ("q",), {("q", "a"): ("q", 1), ("q", "b"): ("q", 0)})


@pytest.fixture
def A2():
    return automaton("A2", ("q",), {("q", "a"): ("q", 0), ("q", "b"): ("q", 1)})


@pytest.fixture
def A3():
    return automaton("A3", ("s", "t"), {
        ("s", "a"): ("t", 0), ("t", "a"): ("s", 2),
        ("s", "b"): ("s", 1), ("t", "b"): ("t", -1),
    })


@pytest.fixture
def Z():
    return automaton("Z", ("q",), {("q", "a"): ("q", 0), ("q", "b"): ("q", 0)})


@pytest.fixture
def chain():
    """q0 -> q1 -> q2, q2 absorbs every symbol."""
    return automaton("C", ("q0", "q1", "q2"), {
        ("q0", "a"): ("q1", 0), ("q0", "b"): ("q1", 0),
        ("q1", "a"): ("q2", 0), ("q1", "b"): ("q2", 0),
        ("q2", "a"): ("q2", 1), ("q2", "b"): ("q2", 0),
    })


@pytest.fixture
def workspace(A1, A2, A3, Z):
    return {a.name: a for a in (A1, A2, A3, Z)}


def solve_square(rows, rhs):
    """Exact Gauss-Jordan; None if singular."""
    n = len(rows)
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def brute_force_vertices(names, rows):
    """All vertices of {x : rows}; rows are (coeffs dict, rel, rhs), sign rows included.

    A vertex is a feasible point where some n linearly independent rows are tight.
    """
    n = len(names)
    vertices = set()
    for system in itertools.combinations(rows, n):
        a = [[Fraction(r[0].get(v, 0)) for v in names] for r in system]
        x = solve_square(a, [Fraction(r[2]) for r in system])
        if x is None:
            continue
        point = dict(zip(names, x))
        ok = True
        for coeffs, rel, rhs in rows:
            lhs = sum(Fraction(c) * point[v] for v, c in coeffs.items())
            if (rel == "=" and lhs != rhs) or (rel == ">=" and lhs < rhs):
                ok = False
                break
        if ok:
            vertices.add(tuple(x))
    return [dict(zip(names, v)) for v in sorted(vertices)]


def running_sums(schedule, n):
    """Yield (position, per-dimension weight totals) along the first n scheduled edges."""
    from itertools import islice

    from mpx.engine import walk_edges

    p = schedule.product
    totals = [0] * p.dimension
    for pos, eid in enumerate(islice(walk_edges(schedule), n), start=1):
        for d, w in enumerate(p.edges[eid].weight):
            totals[d] += w
        yield pos, totals
