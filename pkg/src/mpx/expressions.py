"""Expression trees over lim-inf / lim-sup atoms, the text syntax, and rewrites.

Concrete syntax::

    E := inf(ID) | sup(ID) | min(E, E) | max(E, E) | (E + E) | (E - E) | -E

``-E`` and ``E1 - E2`` are desugared at parse time through :func:`complement`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .automata import INF, SUP, WeightedAutomaton
from .errors import CapExceeded, InputError, ParseError

DEFAULT_PIECE_CAP = 4096


class Expression:
    __slots__ = ()

    def __str__(self):
        return format_expression(self)


@dataclass(frozen=True)
class Atom(Expression):
    kind: str  # INF or SUP
    automaton: WeightedAutomaton

    def __post_init__(self):
        if self.kind not in (INF, SUP):
            raise ValueError(f"bad atom kind {self.kind!r}")


@dataclass(frozen=True)
class Min(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Max(Expression):
    left: Expression
    right: Expression


@dataclass(frozen=True)
class Sum(Expression):
    left: Expression
    right: Expression


BINARY = (Min, Max, Sum)


def inf(a: WeightedAutomaton) -> Atom:
    return Atom(INF, a)


def sup(a: WeightedAutomaton) -> Atom:
    return Atom(SUP, a)


def atoms_of(e: Expression) -> list:
    """Atom occurrences, left to right."""
    if isinstance(e, Atom):
        return [e]
    return atoms_of(e.left) + atoms_of(e.right)


def size(e: Expression) -> int:
    if isinstance(e, Atom):
        return 1
    return 1 + size(e.left) + size(e.right)


def count_max(e: Expression) -> int:
    if isinstance(e, Atom):
        return 0
    return int(isinstance(e, Max)) + count_max(e.left) + count_max(e.right)


def alphabet_of(e: Expression) -> tuple:
    atoms = atoms_of(e)
    alphabet = atoms[0].automaton.alphabet
    for atom in atoms[1:]:
        if set(atom.automaton.alphabet) != set(alphabet):
            raise InputError("alphabet-mismatch")
    return alphabet


def format_expression(e: Expression) -> str:
    if isinstance(e, Atom):
        a = e.automaton
        if a.derived:
            # A!neg under sup is the complement of inf(A), and vice versa
            other = SUP if e.kind == INF else INF
            return f"-{other}({a.base_name})"
        return f"{e.kind}({a.name})"
    if isinstance(e, Sum):
        return f"({format_expression(e.left)} + {format_expression(e.right)})"
    op = "min" if isinstance(e, Min) else "max"
    return f"{op}({format_expression(e.left)}, {format_expression(e.right)})"


def complement(e: Expression) -> Expression:
    """Pointwise numerical negation, pushed down to the atoms."""
    if isinstance(e, Atom):
        return Atom(SUP if e.kind == INF else INF, e.automaton.negated())
    left, right = complement(e.left), complement(e.right)
    if isinstance(e, Max):
        return Min(left, right)
    if isinstance(e, Min):
        return Max(left, right)
    return Sum(left, right)


def _count_pieces(e):
    if isinstance(e, Atom):
        return 1
    left, right = _count_pieces(e.left), _count_pieces(e.right)
    return left + right if isinstance(e, Max) else left * right


def split_max(e: Expression, cap: int = DEFAULT_PIECE_CAP) -> list:
    """MAX-free pieces whose pointwise maximum equals ``e``."""
    n = _count_pieces(e)
    if n > cap:
        raise CapExceeded(f"piece-cap-exceeded({cap})")
    return _split(e)


def _split(e):
    if isinstance(e, Atom):
        return [e]
    left, right = _split(e.left), _split(e.right)
    if isinstance(e, Max):
        return left + right
    op = type(e)
    return [op(x, y) for x in left for y in right]


@dataclass(frozen=True)
class AtomSlot:
    dim: int
    kind: str
    automaton: WeightedAutomaton
    path: str  # node path from the root, e.g. "e", "el", "elr"


@dataclass(frozen=True)
class AtomVector:
    """Atoms of a MAX-free expression, one product dimension each.

    Lim-inf atoms come first (``j`` of them), then lim-sup atoms, each group
    in left-to-right order.
    """

    slots: tuple
    j: int

    def __len__(self):
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)

    @property
    def inf_dims(self):
        return list(range(self.j))

    @property
    def sup_dims(self):
        return list(range(self.j, len(self.slots)))

    def dim_of(self, path):
        for s in self.slots:
            if s.path == path:
                return s.dim
        raise KeyError(path)

    def product_atoms(self):
        return [(s.automaton, s.kind) for s in self.slots]


ROOT = "e"


def atom_paths(e: Expression, path: str = ROOT):
    """(path, atom) pairs, left to right."""
    if isinstance(e, Atom):
        return [(path, e)]
    return atom_paths(e.left, path + "l") + atom_paths(e.right, path + "r")


def is_max_free(e: Expression) -> bool:
    return count_max(e) == 0


def atom_vector(e: Expression) -> AtomVector:
    if not is_max_free(e):
        raise InputError("contains-max")
    pairs = atom_paths(e)
    ordered = [p for p in pairs if p[1].kind == INF] + [p for p in pairs if p[1].kind == SUP]
    slots = tuple(AtomSlot(d, a.kind, a.automaton, path) for d, (path, a) in enumerate(ordered))
    return AtomVector(slots, sum(1 for _, a in pairs if a.kind == INF))


# -- parser -------------------------------------------------------------------

_PUNCT = "(),+-"


def _tokenize(text, source):
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
        elif ch.isspace():
            col, i = col + 1, i + 1
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in _PUNCT:
            tokens.append((ch, ch, line, col))
            col, i = col + 1, i + 1
        elif ch.isalnum() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_.!"):
                j += 1
            tokens.append(("id", text[i:j], line, col))
            col += j - i
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col, source)
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text, automata, source):
        self.tokens = _tokenize(text, source)
        self.pos = 0
        self.automata = automata
        self.source = source

    def peek(self):
        return self.tokens[self.pos]

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        where = "end of input" if tok[0] == "eof" else repr(tok[1])
        raise ParseError(f"{msg}, found {where}", tok[2], tok[3], self.source)

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            self.error(f"expected {kind!r}")
        self.pos += 1
        return tok

    def expression(self):
        tok = self.peek()
        if tok[0] == "-":
            self.pos += 1
            return complement(self.expression())
        if tok[0] == "(":
            self.pos += 1
            left = self.expression()
            op = self.peek()
            if op[0] == ")":
                self.pos += 1
                return left
            if op[0] not in "+-":
                self.error("expected '+', '-' or ')'")
            self.pos += 1
            right = self.expression()
            self.expect(")")
            return Sum(left, right if op[0] == "+" else complement(right))
        if tok[0] == "id":
            self.pos += 1
            word = tok[1]
            if word in (INF, SUP):
                self.expect("(")
                name_tok = self.expect("id")
                self.expect(")")
                return Atom(word, self.resolve(name_tok))
            if word in ("min", "max"):
                self.expect("(")
                left = self.expression()
                self.expect(",")
                right = self.expression()
                self.expect(")")
                return (Min if word == "min" else Max)(left, right)
            self.error("expected inf, sup, min or max", tok)
        self.error("expected an expression")

    def resolve(self, tok):
        name = tok[1]
        if name not in self.automata:
            raise ParseError(f"unknown automaton {name!r}", tok[2], tok[3], self.source)
        return self.automata[name]


def parse_expression(text: str, automata: Mapping[str, WeightedAutomaton],
                     source: str | None = None) -> Expression:
    parser = _Parser(text, automata, source)
    e = parser.expression()
    if parser.peek()[0] != "eof":
        parser.error("expected end of input")
    try:
        alphabet_of(e)
    except InputError:
        raise ParseError("alphabet-mismatch: atoms use different alphabets", None, None, source) from None
    return e
