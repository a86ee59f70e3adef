"""Branch-relative transition probabilities.

For an observer experiencing eta_n at time t, the probability of
experiencing eta_m at a later time s is

    | (<eta_m| <Phi_m(s)|) U(s, t) (|eta_n> |Phi_n(t)>) |^2
    ------------------------------------------------------
           <Phi_m(s)|Phi_m(s)> <Phi_n(t)|Phi_n(t)>

where Phi_n(t) and Phi_m(s) are relative states of the full universal state
at t and s, and U(s, t) is the scenario's propagator (the composed step
unitaries for circuits).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NullBranchError, PreconditionError
from .linalg import inner, tensor
from .scenarios import Scenario
from .universe import REALITY_EPS, Branch, BranchDecomposition


@dataclass(frozen=True)
class TransitionQuery:
    from_label: str
    t: float
    to_label: str
    s: float


def _check_order(sc: Scenario, t: float, s: float) -> tuple[float, float]:
    t, s = sc.check_time(t), sc.check_time(s)
    if s < t:
        raise PreconditionError(f"s={s:g} precedes t={t:g}; only future-directed transitions are defined")
    return t, s


def _relative_probability(sc: Scenario, bn: Branch, t: float, bm: Branch, s: float, ket=None) -> float:
    """The quotient for live branches `bn` at t and `bm` at s; `ket` is the propagated origin if known."""
    if ket is None:
        ket = sc.propagate(tensor(sc.basis.vector(bn.label), bn.state), t, s)
    amp = inner(tensor(sc.basis.vector(bm.label), bm.state), ket)
    p = (amp.real * amp.real + amp.imag * amp.imag) / (bm.weight * bn.weight)
    return min(max(p, 0.0), 1.0)


def _conditional_column(sc: Scenario, bn: Branch, t: float, s: float,
                        at_s: BranchDecomposition, eps: float) -> np.ndarray:
    """Probabilities of every m at s relative to live branch `bn` at t; NaN where m is null at s."""
    ket = sc.propagate(tensor(sc.basis.vector(bn.label), bn.state), t, s)
    out = np.full(len(at_s), np.nan)
    for m, bm in enumerate(at_s.entries):
        if bm.weight > eps:
            out[m] = _relative_probability(sc, bn, t, bm, s, ket)
    return out


def transition_probability(sc: Scenario, q: TransitionQuery, eps: float = REALITY_EPS) -> float:
    t, s = _check_order(sc, q.t, q.s)
    sc.basis.index(q.from_label), sc.basis.index(q.to_label)  # LabelError for unknown labels
    bn = sc.branches_at(t)[q.from_label]
    bm = sc.branches_at(s)[q.to_label]
    for b, time in ((bn, t), (bm, s)):
        if b.weight <= eps:
            raise NullBranchError(b.label, time, b.weight)
    return _relative_probability(sc, bn, t, bm, s)


def revival_probability(sc: Scenario, q: TransitionQuery, eps: float = REALITY_EPS) -> float:
    """Probability that a branch the observer left behind comes back: a cross-branch transition."""
    if q.from_label == q.to_label:
        raise PreconditionError("revival is a cross-branch query; from_label and to_label must differ")
    return transition_probability(sc, q, eps)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Entry [m, n] is P(m at s | n at t); NaN marks cells involving a null branch."""

    labels: tuple[str, ...]
    t: float
    s: float
    probs: np.ndarray

    @property
    def column_sums(self) -> np.ndarray:
        """Per-origin totals over live targets; NaN for null origins. Diagnostic only."""
        sums = np.nansum(self.probs, axis=0)
        sums[np.all(np.isnan(self.probs), axis=0)] = np.nan
        return sums

    def live_from(self) -> list[str]:
        return [lab for j, lab in enumerate(self.labels) if not np.all(np.isnan(self.probs[:, j]))]


def transition_matrix(sc: Scenario, t: float, s: float, eps: float = REALITY_EPS,
                      threads: int | None = 1) -> TransitionMatrix:
    t, s = _check_order(sc, t, s)
    at_t, at_s = sc.branches_at(t), sc.branches_at(s)
    k = len(sc.basis)
    probs = np.full((k, k), np.nan)

    def column(n: int):
        bn = at_t.entries[n]
        if bn.weight <= eps:
            return n, None
        return n, _conditional_column(sc, bn, t, s, at_s, eps)

    if threads is None or threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(column, range(k)))
    else:
        cols = [column(n) for n in range(k)]
    for n, col in cols:
        if col is not None:
            probs[:, n] = col
    probs.setflags(write=False)
    return TransitionMatrix(sc.basis.labels, t, s, probs)
