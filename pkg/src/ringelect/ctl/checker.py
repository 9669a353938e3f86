"""Explicit-state CTL model checking by fixpoint labeling.

Without fairness each operator has its own fixpoint: EU/EF and AU/AF are
least fixpoints over existential and universal preimages, AG is a greatest
fixpoint, EG is reachability of a cycle inside the operand.  With
``Fairness.RUNNING`` path quantifiers range over fair paths only (paths on
which every process label fires infinitely often); the fair operators are
derived from fair EG, EX and EU.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import graph as G
from ..graph import LabeledGraph, Trace
from .formula import AF, AG, AU, AX, EF, EG, EU, EX, And, Atomic, Const, Formula, Implies, Not, Or


class Fairness(enum.Enum):
    NONE = "off"
    RUNNING = "running"

    @classmethod
    def parse(cls, text: str) -> "Fairness":
        text = text.strip().lower()
        if text in ("running", "on", "fair"):
            return cls.RUNNING
        if text in ("off", "none", "no"):
            return cls.NONE
        raise ValueError(f"unknown fairness {text!r}")


@dataclass
class CheckResult:
    holds: bool
    evidence: Optional[Trace]
    sat_count: int
    sat: np.ndarray = field(repr=False)


class Labeler:
    """Computes and memoizes ``Sat(f)`` masks for one graph and fairness."""

    def __init__(self, graph: LabeledGraph, fairness: Fairness = Fairness.NONE):
        graph.require_complete()
        self.graph = graph
        self.fairness = fairness
        self._memo = {}
        self._fair = None

    @property
    def fair(self) -> np.ndarray:
        if self._fair is None:
            self._fair = G.fair_states(self.graph)
        return self._fair

    def sat(self, f: Formula) -> np.ndarray:
        key = (type(f), f)
        if key not in self._memo:
            self._memo[key] = self._compute(f)
        return self._memo[key]

    def _compute(self, f: Formula) -> np.ndarray:
        g = self.graph
        if isinstance(f, Const):
            return g.full(f.value)
        if isinstance(f, Atomic):
            return np.asarray(g.atom_mask(f.atom), dtype=bool)
        if isinstance(f, Not):
            return ~self.sat(f.arg)
        if isinstance(f, And):
            return self.sat(f.left) & self.sat(f.right)
        if isinstance(f, Or):
            return self.sat(f.left) | self.sat(f.right)
        if isinstance(f, Implies):
            return ~self.sat(f.left) | self.sat(f.right)
        if self.fairness is Fairness.RUNNING:
            return self._fair_temporal(f)
        return self._temporal(f)

    def _temporal(self, f):
        g = self.graph
        if isinstance(f, EX):
            return G.pre_exists(g, self.sat(f.arg))
        if isinstance(f, AX):
            return G.pre_forall(g, self.sat(f.arg))
        if isinstance(f, EF):
            return G.backward_reach(g, self.sat(f.arg), g.full())
        if isinstance(f, EU):
            return G.backward_reach(g, self.sat(f.right), self.sat(f.left))
        if isinstance(f, AF):
            return G.forall_reach(g, self.sat(f.arg), g.full())
        if isinstance(f, AU):
            return G.forall_reach(g, self.sat(f.right), self.sat(f.left))
        if isinstance(f, EG):
            return G.exists_globally(g, self.sat(f.arg))
        if isinstance(f, AG):
            return G.forall_invariant(g, self.sat(f.arg))
        raise TypeError(f"not a formula: {f!r}")

    def _fair_temporal(self, f):
        g = self.graph
        if isinstance(f, EX):
            return self.ex_fair(self.sat(f.arg))
        if isinstance(f, AX):
            return ~self.ex_fair(~self.sat(f.arg))
        if isinstance(f, EF):
            return self.eu_fair(g.full(), self.sat(f.arg))
        if isinstance(f, EU):
            return self.eu_fair(self.sat(f.left), self.sat(f.right))
        if isinstance(f, EG):
            return self.eg_fair(self.sat(f.arg))
        if isinstance(f, AF):
            return ~self.eg_fair(~self.sat(f.arg))
        if isinstance(f, AG):
            return ~self.eu_fair(g.full(), ~self.sat(f.arg))
        if isinstance(f, AU):
            a, b = self.sat(f.left), self.sat(f.right)
            return ~(self.eu_fair(~b, ~a & ~b) | self.eg_fair(~b))
        raise TypeError(f"not a formula: {f!r}")

    def ex_fair(self, phi):
        return G.pre_exists(self.graph, phi & self.fair)

    def eu_fair(self, phi, psi):
        return G.backward_reach(self.graph, psi & self.fair, phi)

    def eg_fair(self, phi):
        return G.exists_globally(self.graph, phi, fair=True)


def fair_states(graph: LabeledGraph) -> set:
    """States with a path on which every label fires infinitely often."""
    graph.require_complete()
    return set(np.flatnonzero(G.fair_states(graph)).tolist())


def check(graph: LabeledGraph, f: Formula, fairness: Fairness = Fairness.NONE) -> CheckResult:
    """Decide ``f`` at the initial state and attach evidence.

    Evidence is a finite witness for true EF/EU, a finite counterexample for
    false AG, and a lasso for false AF or true EG.  Under fairness the
    lasso's loop fires every label.
    """
    lab = Labeler(graph, fairness)
    sat = lab.sat(f)
    holds = bool(sat[graph.initial])
    return CheckResult(holds, _evidence(lab, f, holds), int(sat.sum()), sat)


def _evidence(lab: Labeler, f: Formula, holds: bool) -> Optional[Trace]:
    g = lab.graph
    fair = lab.fairness is Fairness.RUNNING
    goal_mask = lab.fair if fair else g.full()
    start = g.initial
    if holds and isinstance(f, EF):
        return G.finite_trace(g, start, lab.sat(f.arg) & goal_mask)
    if holds and isinstance(f, EU):
        return G.finite_trace(g, start, lab.sat(f.right) & goal_mask, within=lab.sat(f.left) | (lab.sat(f.right) & goal_mask))
    if not holds and isinstance(f, AG):
        return G.finite_trace(g, start, ~lab.sat(f.arg) & goal_mask)
    if not holds and isinstance(f, AF):
        return G.lasso(g, start, ~lab.sat(f.arg), fair)
    if holds and isinstance(f, EG):
        return G.lasso(g, start, lab.sat(f.arg), fair)
    return None
