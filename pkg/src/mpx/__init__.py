"""Exact maximum value and decision procedures for mean-payoff automaton expressions."""

from .errors import CapExceeded, InputError, MpxError, ParseError
from .numerics import (
    LinearConstraint,
    LinearProgram,
    LpOutcome,
    check_feasible,
    format_rational,
    make_rational,
    parse_rational,
    solve_lp,
)
from .automata import (
    INF,
    SUP,
    WeightedAutomaton,
    build_product,
    enumerate_simple_cycles,
    max_mean_cycle,
    parse_automaton,
    reachable_sccs,
)
from .expressions import (
    Atom,
    Max,
    Min,
    Sum,
    atom_vector,
    complement,
    parse_expression,
    split_max,
)
from .engine import (
    LassoWord,
    Verdict,
    distance,
    emit_prefix,
    equivalent,
    evaluate_lasso,
    includes,
    is_empty,
    is_universal,
    max_value,
    max_value_max_free,
    witness_schedule,
)

__version__ = "0.1.0"
