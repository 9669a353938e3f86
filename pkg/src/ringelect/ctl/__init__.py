from .checker import CheckResult, Fairness, Labeler, check, fair_states
from .formula import (
    AF,
    AG,
    AU,
    AX,
    EF,
    EG,
    EU,
    EX,
    FALSE,
    TRUE,
    And,
    Atomic,
    Const,
    Formula,
    Implies,
    Not,
    Or,
    conjunction,
    disjunction,
    flatten,
    parse_formula,
)
from .properties import BuiltinProperty, builtin_properties
