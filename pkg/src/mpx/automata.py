"""Deterministic weighted automata, their synchronized product, and graph analysis.

The product is built lazily from the initial tuple, so only reachable
vertices exist. Vertices and edges are addressed by integer indices; edge
``v * |alphabet| + symbol_index`` leaves vertex ``v`` on that symbol.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import CapExceeded, InputError, ParseError
from .numerics import format_rational, parse_rational

INF = "inf"
SUP = "sup"

NEG_SUFFIX = "!neg"
DEFAULT_CYCLE_CAP = 100_000


@dataclass(frozen=True, eq=True)
class WeightedAutomaton:
    name: str
    alphabet: tuple
    states: tuple
    initial: str
    transitions: dict  # (state, symbol) -> (successor, weight)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "states", tuple(self.states))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InputError(f"automaton {self.name}: repeated alphabet symbol")
        if len(set(self.states)) != len(self.states):
            raise InputError(f"automaton {self.name}: repeated state")
        if self.initial not in self.states:
            raise InputError(f"automaton {self.name}: initial state {self.initial!r} is not a state")
        trans = {}
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.transitions:
                    raise InputError(f"automaton {self.name}: missing transition for ({q}, {a})")
                dst, w = self.transitions[(q, a)]
                if dst not in self.states:
                    raise InputError(f"automaton {self.name}: unknown target state {dst!r}")
                trans[(q, a)] = (dst, Fraction(w))
        if len(trans) != len(self.transitions):
            raise InputError(f"automaton {self.name}: transition on unknown state or symbol")
        object.__setattr__(self, "transitions", trans)

    def __hash__(self):
        return hash((self.name, self.alphabet, self.states, self.initial))

    def step(self, state, symbol):
        return self.transitions[(state, symbol)]

    def max_abs_weight(self) -> Fraction:
        return max((abs(w) for _, w in self.transitions.values()), default=Fraction(0))

    @property
    def derived(self) -> bool:
        return self.name.endswith(NEG_SUFFIX)

    @property
    def base_name(self) -> str:
        return self.name[: -len(NEG_SUFFIX)] if self.derived else self.name

    def negated(self) -> "WeightedAutomaton":
        """Same automaton with every weight negated; ``A`` and ``A!neg`` swap."""
        name = self.base_name if self.derived else self.name + NEG_SUFFIX
        trans = {k: (dst, -w) for k, (dst, w) in self.transitions.items()}
        return WeightedAutomaton(name, self.alphabet, self.states, self.initial, trans)


def parse_automaton(text: str, source: str | None = None) -> WeightedAutomaton:
    """Read the line-directive automaton format (``automaton``, ``alphabet``,
    ``states``, ``initial``, ``trans SRC SYMBOL DST WEIGHT``)."""
    name = alphabet = states = initial = None
    trans = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        if head == "automaton":
            if len(args) != 1:
                raise ParseError("'automaton' takes one name", lineno, 1, source)
            name = args[0]
        elif head == "alphabet":
            alphabet = args
        elif head == "states":
            states = args
        elif head == "initial":
            if len(args) != 1:
                raise ParseError("'initial' takes one state", lineno, 1, source)
            initial = args[0]
        elif head == "trans":
            if len(args) != 4:
                raise ParseError("'trans' expects SRC SYMBOL DST WEIGHT", lineno, 1, source)
            src, sym, dst, weight = args
            if (src, sym) in trans:
                raise ParseError(f"duplicate transition for ({src}, {sym})", lineno, 1, source)
            try:
                trans[(src, sym)] = (dst, parse_rational(weight))
            except InputError as exc:
                raise ParseError(str(exc), lineno, 1, source) from None
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, 1, source)
    for key, val in (("automaton", name), ("alphabet", alphabet), ("states", states), ("initial", initial)):
        if val is None:
            raise ParseError(f"missing '{key}' directive", None, None, source)
    for (src, sym) in trans:
        if src not in states:
            raise ParseError(f"transition from unknown state {src!r}", None, None, source)
        if sym not in alphabet:
            raise ParseError(f"transition on unknown symbol {sym!r}", None, None, source)
    try:
        return WeightedAutomaton(name, alphabet, states, initial, trans)
    except InputError as exc:
        raise ParseError(str(exc), None, None, source) from None


def load_automaton(path) -> WeightedAutomaton:
    path = Path(path)
    return parse_automaton(path.read_text(encoding="utf-8"), source=str(path))


def format_automaton(a: WeightedAutomaton) -> str:
    lines = [
        f"automaton {a.name}",
        "alphabet " + " ".join(a.alphabet),
        "states " + " ".join(a.states),
        f"initial {a.initial}",
    ]
    for q in a.states:
        for s in a.alphabet:
            dst, w = a.transitions[(q, s)]
            lines.append(f"trans {q} {s} {dst} {format_rational(w)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    symbol: str
    dst: int
    weight: tuple


@dataclass(frozen=True)
class ProductAutomaton:
    atoms: tuple  # (automaton name, kind) per dimension
    alphabet: tuple
    vertices: tuple  # state tuples, in BFS discovery order
    edges: tuple  # indexed by v * |alphabet| + symbol index
    initial: int = 0

    @property
    def dimension(self) -> int:
        return len(self.atoms)

    def out_edges(self, v):
        m = len(self.alphabet)
        return self.edges[v * m:(v + 1) * m]

    def edge(self, v, symbol) -> Edge:
        return self.edges[v * len(self.alphabet) + self.alphabet.index(symbol)]

    def run(self, word, start=None):
        """Vertices visited along ``word`` (deterministic, one path)."""
        v = self.initial if start is None else start
        path = [v]
        for s in word:
            v = self.edge(v, s).dst
            path.append(v)
        return path


def build_product(atoms: Sequence) -> ProductAutomaton:
    """Synchronized product of ``(automaton, kind)`` pairs, reachable part only."""
    if not atoms:
        raise InputError("product of an empty atom list")
    automata = [a for a, _ in atoms]
    alphabet = automata[0].alphabet
    for a in automata[1:]:
        if set(a.alphabet) != set(alphabet):
            raise InputError("alphabet-mismatch")
    start = tuple(a.initial for a in automata)
    index = {start: 0}
    vertices = [start]
    edges = []
    queue = deque([start])
    while queue:
        v = queue.popleft()
        vi = index[v]
        for sym in alphabet:
            succ, weights = [], []
            for a, q in zip(automata, v):
                dst, w = a.transitions[(q, sym)]
                succ.append(dst)
                weights.append(w)
            succ = tuple(succ)
            if succ not in index:
                index[succ] = len(vertices)
                vertices.append(succ)
                queue.append(succ)
            edges.append(Edge(len(edges), vi, sym, index[succ], tuple(weights)))
    return ProductAutomaton(
        atoms=tuple((a.name, kind) for a, kind in atoms),
        alphabet=tuple(alphabet),
        vertices=tuple(vertices),
        edges=tuple(edges),
    )


@dataclass(frozen=True)
class Component:
    id: int
    vertices: tuple
    edges: tuple  # ids of edges with both endpoints inside
    has_cycle: bool


@dataclass(frozen=True)
class SccPartition:
    component_of: tuple
    components: tuple

    def cyclic(self):
        return [c for c in self.components if c.has_cycle]


def _tarjan(n, successors):
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack, result = [], []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                result.append(comp)
    return result


def reachable_sccs(p: ProductAutomaton) -> SccPartition:
    """Strongly connected components, numbered by their smallest vertex index."""
    n = len(p.vertices)
    comps = _tarjan(n, lambda v: [e.dst for e in p.out_edges(v)])
    comps = sorted((sorted(c) for c in comps), key=lambda c: c[0])
    component_of = [0] * n
    for cid, comp in enumerate(comps):
        for v in comp:
            component_of[v] = cid
    components = []
    for cid, comp in enumerate(comps):
        inner = tuple(e.id for v in comp for e in p.out_edges(v) if component_of[e.dst] == cid)
        components.append(Component(cid, tuple(comp), inner, bool(inner)))
    return SccPartition(tuple(component_of), tuple(components))


@dataclass(frozen=True)
class SimpleCycle:
    edges: tuple  # edge ids, starting at the smallest vertex index
    vertices: tuple  # vertices[i] is the source of edges[i]
    weight: tuple

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def average(self) -> tuple:
        return tuple(w / self.length for w in self.weight)

    @property
    def start(self) -> int:
        return self.vertices[0]

    def symbols(self, p: ProductAutomaton) -> list:
        return [p.edges[e].symbol for e in self.edges]


def make_cycle(p: ProductAutomaton, edge_ids) -> SimpleCycle:
    """Build a cycle from a closed edge sequence, rotated to its smallest vertex."""
    edge_ids = list(edge_ids)
    srcs = [p.edges[e].src for e in edge_ids]
    k = srcs.index(min(srcs))
    edge_ids = edge_ids[k:] + edge_ids[:k]
    srcs = srcs[k:] + srcs[:k]
    weight = tuple(
        sum((p.edges[e].weight[d] for e in edge_ids), Fraction(0)) for d in range(p.dimension)
    )
    return SimpleCycle(tuple(edge_ids), tuple(srcs), weight)


def _component(p, scc, component):
    if scc is None:
        scc = reachable_sccs(p)
    comp = scc.components[component]
    if not comp.has_cycle:
        raise InputError(f"component {component} has no cycle")
    return comp


def enumerate_simple_cycles(p: ProductAutomaton, component: int, cap: int = DEFAULT_CYCLE_CAP,
                            scc: SccPartition | None = None) -> list:
    """All simple cycles of one component (Johnson's algorithm).

    Parallel edges (different symbols between the same vertices) give
    distinct cycles. Raises :class:`CapExceeded` past ``cap`` cycles.
    """
    comp = _component(p, scc, component)
    members = set(comp.vertices)
    parallel = {}  # (u, v) -> edge ids
    for eid in comp.edges:
        e = p.edges[eid]
        parallel.setdefault((e.src, e.dst), []).append(eid)
    succ = {v: sorted({w for (u, w) in parallel if u == v}) for v in comp.vertices}

    cycles = []

    def emit(vertex_cycle):
        choices = [[]]
        for i, u in enumerate(vertex_cycle):
            v = vertex_cycle[(i + 1) % len(vertex_cycle)]
            choices = [c + [eid] for c in choices for eid in parallel[(u, v)]]
        for c in choices:
            cycles.append(make_cycle(p, c))
            if len(cycles) > cap:
                raise CapExceeded(f"cycle-cap-exceeded({cap})")

    for s in sorted(members):
        # Johnson's circuit search from s over vertices >= s
        allowed = {v for v in members if v >= s}
        blocked = set()
        bmap = {v: set() for v in allowed}
        path = [s]
        blocked.add(s)
        stack = [(s, iter(w for w in succ[s] if w in allowed))]
        closed = [False]

        def unblock(u):
            todo = [u]
            while todo:
                x = todo.pop()
                if x in blocked:
                    blocked.discard(x)
                    todo.extend(bmap[x])
                    bmap[x].clear()

        while stack:
            v, it = stack[-1]
            moved = False
            for w in it:
                if w == s:
                    emit(list(path))
                    closed[-1] = True
                elif w not in blocked:
                    path.append(w)
                    blocked.add(w)
                    stack.append((w, iter(x for x in succ[w] if x in allowed)))
                    closed.append(False)
                    moved = True
                    break
            if moved:
                continue
            stack.pop()
            was_closed = closed.pop()
            if was_closed:
                unblock(v)
            else:
                for w in succ[v]:
                    if w in allowed:
                        bmap[w].add(v)
            path.pop()
            if closed:
                closed[-1] = closed[-1] or was_closed
    return cycles


def max_mean_cycle(p: ProductAutomaton, component: int, dim: int,
                   scc: SccPartition | None = None) -> Fraction:
    """Maximum cycle mean in one dimension of a component (Karp's recurrence)."""
    comp = _component(p, scc, component)
    if not 0 <= dim < p.dimension:
        raise InputError(f"dimension {dim} out of range")
    verts = list(comp.vertices)
    pos = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    edges = [(pos[p.edges[e].src], pos[p.edges[e].dst], p.edges[e].weight[dim]) for e in comp.edges]
    # best[k][v]: max weight of a k-edge walk from verts[0] to v
    best = [[None] * n for _ in range(n + 1)]
    best[0][0] = Fraction(0)
    for k in range(1, n + 1):
        prev, cur = best[k - 1], best[k]
        for u, v, w in edges:
            if prev[u] is not None:
                cand = prev[u] + w
                if cur[v] is None or cand > cur[v]:
                    cur[v] = cand
    result = None
    for v in range(n):
        if best[n][v] is None:
            continue
        worst = None
        for k in range(n):
            if best[k][v] is not None:
                val = (best[n][v] - best[k][v]) / (n - k)
                if worst is None or val < worst:
                    worst = val
        if worst is not None and (result is None or worst > result):
            result = worst
    return result


def shortest_path(p: ProductAutomaton, source: int, target: int, within=None) -> list:
    """Edge ids of a shortest path (BFS, symbol order), optionally inside a vertex set."""
    if source == target:
        return []
    parent = {source: None}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for e in p.out_edges(v):
            if within is not None and e.dst not in within:
                continue
            if e.dst not in parent:
                parent[e.dst] = e.id
                if e.dst == target:
                    path = []
                    x = target
                    while parent[x] is not None:
                        path.append(parent[x])
                        x = p.edges[parent[x]].src
                    return path[::-1]
                queue.append(e.dst)
    raise InputError(f"vertex {target} unreachable from {source}")
