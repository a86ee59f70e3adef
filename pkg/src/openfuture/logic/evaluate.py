"""Context-dependent truth values of tensed propositions about experiences.

A proposition is judged by an observer in branch `ctx.branch_label` at
utterance time `ctx.t`:

* future atoms (s > t) take the branch-relative transition probability;
* present atoms (s = t) are settled by the context branch itself;
* past atoms (s < t) are settled by the observer's records when the
  scenario keeps them, and are undetermined ([0, 1]) otherwise.

Atoms at one time describe mutually exclusive experiences, so any
sub-formula whose atoms all share a single time is evaluated exactly as the
measure of the set of outcomes it selects.  Compounds mixing times are only
constrained, not determined, by their parts and get Frechet intervals.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from ..errors import NullBranchError
from ..scenarios import Scenario
from ..transition import TransitionQuery, transition_probability
from ..universe import REALITY_EPS
from .syntax import And, Atom, Not, Or, Proposition
from .truth import (
    FALSE,
    TRUE,
    UNDETERMINED,
    TruthValue,
    frechet_and,
    frechet_or,
    partition_measure,
)

_REST = object()  # partition cell for every experience not named in a formula


@dataclass(frozen=True)
class Context:
    branch_label: str
    t: float


class _Evaluator:
    def __init__(self, sc: Scenario, ctx: Context, eps: float):
        self.sc = sc
        self.branch = ctx.branch_label
        self.t = sc.check_time(ctx.t)
        self.eps = eps
        sc.basis.index(self.branch)
        w = sc.branches_at(self.t).weight(self.branch)
        if w <= eps:
            raise NullBranchError(self.branch, self.t, w)
        self._memo: dict[tuple[str, float], TruthValue] = {}

    def time_of(self, a: Atom) -> float:
        return self.sc.check_time(a.time)

    def atom(self, a: Atom) -> TruthValue:
        s = self.time_of(a)
        key = (a.label, s)
        if key not in self._memo:
            self._memo[key] = self._atom(a.label, s)
        return self._memo[key]

    def _atom(self, label: str, s: float) -> TruthValue:
        self.sc.basis.index(label)
        if s > self.t:
            try:
                p = transition_probability(self.sc, TransitionQuery(self.branch, self.t, label, s), self.eps)
            except NullBranchError:
                # the experience does not occur at s at all
                return FALSE
            return TruthValue.probability(p)
        if s == self.t:
            return TRUE if label == self.branch else FALSE
        seen = self.sc.remembered(self.branch, self.t, s)
        if seen is None:
            return UNDETERMINED
        return TRUE if label == seen else FALSE

    def times(self, p: Proposition) -> set[float]:
        if isinstance(p, Atom):
            return {self.time_of(p)}
        if isinstance(p, Not):
            return self.times(p.operand)
        return self.times(p.left) | self.times(p.right)

    def value(self, p: Proposition) -> TruthValue:
        if isinstance(p, Atom):
            return self.atom(p)
        if len(self.times(p)) == 1:
            return self._same_time(p)
        if isinstance(p, Not):
            return ~self.value(p.operand)
        if isinstance(p, And):
            return frechet_and(self.value(p.left), self.value(p.right))
        return frechet_or(self.value(p.left), self.value(p.right))

    def _same_time(self, p: Proposition) -> TruthValue:
        named: dict[str, Atom] = {}
        stack = [p]
        while stack:
            q = stack.pop()
            if isinstance(q, Atom):
                named.setdefault(q.label, q)
            elif isinstance(q, Not):
                stack.append(q.operand)
            else:
                stack += [q.left, q.right]
        cells = {lab: self.atom(a) for lab, a in named.items()}
        if all(v.lo == v.hi for v in cells.values()):
            rest = max(0, 1 - sum(v.lo for v in cells.values()))
            cells[_REST] = TruthValue.point(rest)
        else:
            cells[_REST] = TruthValue(max(0, 1 - sum(v.hi for v in cells.values())),
                                      max(0, 1 - sum(v.lo for v in cells.values())))
        return partition_measure(cells, [c for c in cells if _holds(p, c)])


def _holds(p: Proposition, outcome) -> bool:
    if isinstance(p, Atom):
        return p.label == outcome
    if isinstance(p, Not):
        return not _holds(p.operand, outcome)
    if isinstance(p, And):
        return _holds(p.left, outcome) and _holds(p.right, outcome)
    return _holds(p.left, outcome) or _holds(p.right, outcome)


def evaluate(p: Proposition, sc: Scenario, ctx: Context, eps: float = REALITY_EPS) -> TruthValue:
    return _Evaluator(sc, ctx, eps).value(p)


def truth_profile(p: Proposition, sc: Scenario, ctx_branch: str, times: Sequence[float],
                  eps: float = REALITY_EPS, threads: int | None = 1) -> list[TruthValue]:
    """Truth value of a fixed proposition as uttered from `ctx_branch` at each of `times`."""
    def one(t):
        return evaluate(p, sc, Context(ctx_branch, t), eps)

    if threads is None or threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, times))
    return [one(t) for t in times]
