"""Command-line frontend: ``mpx <command> -a DIR -e FILE [options]``.

Results go to stdout one ``key value`` pair per line; diagnostics go to
stderr. Exit codes: 0 answered, 2 input error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .automata import DEFAULT_CYCLE_CAP, build_product, load_automaton, reachable_sccs
from .constraints import ThresholdVariables
from .errors import CapExceeded, InputError, MpxError
from .expressions import DEFAULT_PIECE_CAP, Sum, alphabet_of, atom_vector, complement, parse_expression, split_max
from .engine import (
    DEFAULT_EPSILON,
    LassoWord,
    distance_expression,
    emit_prefix,
    evaluate_lasso,
    max_value,
    piece_system,
    witness,
)
from .numerics import format_rational, parse_rational

AUTOMATON_SUFFIX = ".aut"
COMMANDS = ("maxvalue", "empty", "universal", "includes", "equiv", "distance", "eval-lasso", "witness", "validate")


@dataclass
class Workspace:
    automata: dict = field(default_factory=dict)
    expressions: dict = field(default_factory=dict)  # path -> Expression


def load_workspace(directory, expr_files=()) -> Workspace:
    """Load every ``*.aut`` file under ``directory`` and parse the expression files.

    All problems are collected and reported together in one InputError.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"{directory}: not a directory")
    problems = []
    ws = Workspace()
    origin = {}
    for path in sorted(directory.glob(f"*{AUTOMATON_SUFFIX}")):
        try:
            a = load_automaton(path)
        except InputError as exc:
            problems.append(str(exc))
            continue
        if a.name in origin:
            problems.append(f"duplicate automaton {a.name!r} in {origin[a.name]} and {path}")
            continue
        origin[a.name] = path
        ws.automata[a.name] = a
    if not problems:
        for f in expr_files:
            path = Path(f)
            try:
                text = path.read_text(encoding="utf-8")
                ws.expressions[str(path)] = parse_expression(text, ws.automata, source=str(path))
            except OSError as exc:
                problems.append(f"{path}: {exc.strerror}")
            except InputError as exc:
                problems.append(str(exc))
    if problems:
        raise InputError("\n".join(problems))
    return ws


def parse_word(text: str, alphabet) -> tuple:
    text = text.strip()
    if not text:
        return ()
    if any(ch.isspace() for ch in text):
        symbols = text.split()
    elif text in alphabet:
        symbols = [text]
    else:
        symbols = list(text)
    for s in symbols:
        if s not in alphabet:
            raise InputError(f"symbol {s!r} not in alphabet")
    return tuple(symbols)


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _parser():
    ap = _Parser(prog="mpx", description="Mean-payoff automaton expression queries.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("-a", "--automata", required=True, metavar="DIR", help="directory of *.aut files")
    ap.add_argument("-e", "--expr", metavar="FILE", help="expression file")
    ap.add_argument("-e2", "--expr2", metavar="FILE", help="second expression file")
    ap.add_argument("--nu", default=None, help="threshold p/q")
    ap.add_argument("--epsilon", default=None, help="witness slack p/q (default 1/100)")
    ap.add_argument("--prefix", type=int, default=20, help="witness prefix length")
    ap.add_argument("--u", default="", help="lasso stem")
    ap.add_argument("--v", default=None, help="lasso loop")
    ap.add_argument("--cycle-cap", type=int, default=DEFAULT_CYCLE_CAP)
    ap.add_argument("--piece-cap", type=int, default=DEFAULT_PIECE_CAP)
    ap.add_argument("--oracle", action="store_true", help="use the cycle-enumeration LP")
    ap.add_argument("--dump-constraints", action="store_true")
    return ap


def _dump(e, out, piece_cap):
    for i, piece in enumerate(split_max(e, piece_cap)):
        atoms = atom_vector(piece)
        p = build_product(atoms.product_atoms())
        partition = reachable_sccs(p)
        tv = ThresholdVariables(piece)
        for comp in partition.cyclic():
            out.write(f"dump piece {i} scc {comp.id}\n")
            out.write(piece_system(piece, atoms, p, partition, comp.id, tv).render() + "\n")


def _require(value, flag):
    if value is None:
        raise InputError(f"missing required option {flag}")
    return value


def _execute(args, out):
    files = [str(Path(f)) for f in (args.expr, args.expr2) if f]
    ws = load_workspace(args.automata, files)
    lines = []

    def emit(key, value):
        lines.append(f"{key} {value}")

    if args.command == "validate":
        emit("valid", "true")
        emit("automata", len(ws.automata))
        for f in files:
            emit("expression", ws.expressions[f])
        out.write("\n".join(lines) + "\n")
        return

    e1 = ws.expressions[str(Path(_require(args.expr, "-e")))]
    kw = dict(oracle=args.oracle, cycle_cap=args.cycle_cap, piece_cap=args.piece_cap)
    cmd = args.command

    if cmd == "eval-lasso":
        alphabet = alphabet_of(e1)
        w = LassoWord(parse_word(args.u, alphabet), parse_word(_require(args.v, "--v"), alphabet))
        emit("result", format_rational(evaluate_lasso(e1, w)))
        out.write("\n".join(lines) + "\n")
        return

    if cmd in ("includes", "equiv", "distance"):
        e2 = ws.expressions[str(Path(_require(args.expr2, "-e2")))]
        alphabet_of(Sum(e1, e2))
        target = Sum(e1, complement(e2)) if cmd == "includes" else distance_expression(e1, e2)
    elif cmd == "universal":
        target = complement(e1)
    else:
        target = e1

    if args.dump_constraints:
        _dump(target, out, args.piece_cap)

    if cmd == "witness":
        eps = parse_rational(args.epsilon) if args.epsilon else DEFAULT_EPSILON
        if eps <= 0:
            raise InputError("--epsilon must be positive")
        if args.prefix < 1:
            raise InputError("--prefix must be positive")
        v = witness(e1, eps, **kw)
        emit("result", format_rational(v.value))
        emit("piece", v.piece)
        emit("scc", v.scc)
        emit("prefix", " ".join(emit_prefix(v.schedule, args.prefix)))
        out.write("\n".join(lines) + "\n")
        return

    v = max_value(target, **kw)
    value = v.value
    if cmd == "universal":
        value = -value
    if cmd in ("empty", "universal"):
        nu = parse_rational(_require(args.nu, "--nu"))
        answer = value >= nu
    elif cmd == "includes":
        answer = value <= 0
    elif cmd == "equiv":
        answer = value == 0
    else:
        answer = None
    emit("result", format_rational(value))
    if answer is not None:
        emit("verdict", "true" if answer else "false")
    emit("piece", v.piece)
    emit("scc", v.scc)
    out.write("\n".join(lines) + "\n")


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        err.write(f"error: {exc}\n")
        return 2
    try:
        _execute(args, out)
    except CapExceeded as exc:
        err.write(f"error: {exc}\n")
        return 3
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except MpxError as exc:
        err.write(f"internal error: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
