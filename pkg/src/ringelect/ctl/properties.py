"""The three correctness properties of ring leader election."""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

from ..protocol import IsLeader, VidEquals
from .checker import Fairness
from .formula import AF, AG, EF, And, Atomic, Formula, Implies, conjunction, disjunction


class BuiltinProperty(NamedTuple):
    name: str
    formula: Formula
    fairness: Fairness
    expected: bool
    description: str


def _leader(i):
    return Atomic(IsLeader(i))


def builtin_properties(n: int, max_uid: int) -> list:
    """P1 eventual election (checked under fairness), P2 two leaders at once
    (must be unreachable), P3 the leader carries ``max_uid``."""
    if n < 1:
        raise ValueError("ring size must be at least 1")
    p1 = AF(disjunction(_leader(i) for i in range(n)))
    p2 = EF(disjunction(And(_leader(i), _leader(j)) for i, j in combinations(range(n), 2)))
    p3 = AG(conjunction(Implies(_leader(i), Atomic(VidEquals(i, max_uid))) for i in range(n)))
    return [
        BuiltinProperty("P1", p1, Fairness.RUNNING, True, "eventually a leader is elected"),
        BuiltinProperty("P2", p2, Fairness.NONE, False, "two leaders are never elected together"),
        BuiltinProperty("P3", p3, Fairness.NONE, True, "the leader's virtual id is the maximum uid"),
    ]
