"""Scenarios: dynamics + initial state + observer factorization + experience basis.

Two kinds of dynamics are supported.  A Hamiltonian scenario evolves
continuously, exp(-iHt).  A circuit scenario applies a fixed sequence of
step unitaries, one per time bin of width `dt`; its times are restricted to
the grid 0, dt, ..., len(steps)*dt.

The cat models live here too.  The observed-cat record circuit keeps the
observer's memory in a "which bin" register: basis state 0 means no death
has been seen, basis state k means the death was seen in bin k.  This is
the reachable subspace of a one-qubit-per-bin record register (at most one
record bit is ever set), so it carries the same physics at dimension
2*(steps+1) instead of 2**(steps+1).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, GridError, ScenarioValidationError
from .linalg import (
    MAX_DIM,
    NORM_TOL,
    HermitianOperator,
    StateVector,
    apply_unitary,
    check_unitary,
    evolve,
)
from .universe import BranchDecomposition, ExperienceBasis, Factorization, decompose

GRID_TOL = 1e-9

# (branch label at utterance time t, t, earlier time s) -> label experienced at s, or None
RecordMap = Callable[[str, float, float], Optional[str]]


class Step:
    """One circuit step: `unitary` acting on tensor factors `targets`."""

    def __init__(self, unitary, targets: Sequence[int]):
        self.unitary = check_unitary(np.asarray(unitary, dtype=np.complex128))
        self.unitary.setflags(write=False)
        self.targets = tuple(int(k) for k in targets)

    def apply(self, psi: StateVector) -> StateVector:
        return apply_unitary(self.unitary, psi, self.targets, check=False)


class _CatStep(Step):
    # Rotation in the plane {|none, alive>, |bin k, dead>}; identity elsewhere.
    # Applied as a 2x2 Givens rotation, the dense matrix is only built on request.

    def __init__(self, k: int, steps: int, cos_theta: float, sin_theta: float):
        self.k = k
        self.dim = 2 * (steps + 1)
        self.c = cos_theta
        self.s = sin_theta
        self.targets = (0, 1)

    @property
    def unitary(self) -> np.ndarray:
        u = np.eye(self.dim, dtype=np.complex128)
        j = 2 * self.k + 1
        u[0, 0], u[j, 0], u[0, j], u[j, j] = self.c, self.s, -self.s, self.c
        return u

    def apply(self, psi: StateVector) -> StateVector:
        a = psi.amps.copy()
        j = 2 * self.k + 1
        a0, aj = a[0], a[j]
        a[0] = self.c * a0 - self.s * aj
        a[j] = self.s * a0 + self.c * aj
        return StateVector(a, psi.dims)


class _CatSteps(Sequence):
    def __init__(self, steps: int, cos_theta: float, sin_theta: float):
        self._items = [_CatStep(k, steps, cos_theta, sin_theta) for k in range(1, steps + 1)]

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, i):
        return self._items[i]


class Scenario:
    """Immutable description of a modeled universe with one experiencing observer.

    Exactly one of `hamiltonian` or `steps` (with `dt`) must be given.
    `records`, when present, lets past-tense propositions be settled from the
    observer's memory.
    """

    def __init__(
        self,
        name: str,
        dims: Sequence[int],
        observer_factors: int,
        initial: StateVector,
        basis: ExperienceBasis,
        hamiltonian: HermitianOperator | None = None,
        steps: Sequence[Step] | None = None,
        dt: float | None = None,
        records: RecordMap | None = None,
        max_dim: int = MAX_DIM,
    ):
        self.name = str(name)
        self.dims = tuple(int(d) for d in dims)
        if not self.dims or any(d <= 0 for d in self.dims):
            raise ScenarioValidationError("dimension", f"factor dimensions must be positive, got {self.dims}")
        total = int(np.prod(self.dims))
        if total > max_dim:
            raise CapacityError(f"total dimension {total} exceeds maximum {max_dim}")
        try:
            self.factorization = Factorization.from_dims(self.dims, observer_factors)
        except DimensionError as exc:
            raise ScenarioValidationError("dimension", str(exc)) from None

        if initial.dim != total:
            raise ScenarioValidationError("dimension", f"initial state has dimension {initial.dim}, expected {total}")
        if not initial.is_normalized(NORM_TOL):
            raise ScenarioValidationError("normalization", f"initial state has norm {initial.norm():.12g}")
        self.initial = StateVector(initial.amps, self.dims)

        if len(basis) != self.factorization.dim_S:
            raise ScenarioValidationError(
                "dimension", f"basis has {len(basis)} vectors, observer dimension is {self.factorization.dim_S}")
        self.basis = basis

        if (hamiltonian is None) == (steps is None):
            raise ScenarioValidationError("dynamics", "exactly one of a Hamiltonian or a step sequence is required")
        self.hamiltonian = hamiltonian
        self.steps = steps
        self.dt = None
        if hamiltonian is not None:
            if hamiltonian.dim != total:
                raise ScenarioValidationError(
                    "dimension", f"Hamiltonian dimension {hamiltonian.dim} does not match state dimension {total}")
        else:
            if dt is None or not math.isfinite(dt) or dt <= 0:
                raise ScenarioValidationError("dynamics", f"circuit step size must be positive and finite, got {dt}")
            self.dt = float(dt)
            for i, st in enumerate(steps):
                if any(k < 0 or k >= len(self.dims) for k in st.targets) or len(set(st.targets)) != len(st.targets):
                    raise ScenarioValidationError("targets", f"step {i}: bad target factors {st.targets}")
                if isinstance(st, _CatStep):
                    continue
                tdim = int(np.prod([self.dims[k] for k in st.targets]))
                if st.unitary.shape != (tdim, tdim):
                    raise ScenarioValidationError(
                        "dimension", f"step {i}: unitary shape {st.unitary.shape} does not match targets ({tdim})")
        self.records = records
        self._lock = threading.Lock()
        self._trajectory = [self.initial]

    def __repr__(self) -> str:
        kind = "hamiltonian" if self.is_hamiltonian else f"circuit[{len(self.steps)} x dt={self.dt:g}]"
        return f"Scenario({self.name!r}, dims={self.dims}, {kind}, labels={list(self.basis.labels)})"

    @property
    def is_hamiltonian(self) -> bool:
        return self.hamiltonian is not None

    @property
    def labels(self) -> tuple[str, ...]:
        return self.basis.labels

    @property
    def t_max(self) -> float:
        return math.inf if self.is_hamiltonian else len(self.steps) * self.dt

    def grid_index(self, t: float) -> int:
        """Step count reaching time `t` in a circuit scenario."""
        if not math.isfinite(t):
            raise GridError(f"time must be finite, got {t}")
        if self.is_hamiltonian:
            raise GridError("Hamiltonian scenarios have no step grid")
        k = round(t / self.dt)
        if abs(t - k * self.dt) > GRID_TOL * max(1.0, abs(t)):
            raise GridError(f"time {t} is not on the step grid (dt={self.dt:g})")
        if k < 0 or k > len(self.steps):
            raise GridError(f"time {t} is outside the simulated range [0, {self.t_max:g}]")
        return k

    def check_time(self, t: float) -> float:
        """Validate `t` and return its canonical value (snapped to the grid for circuits)."""
        if self.is_hamiltonian:
            if not math.isfinite(t):
                raise GridError(f"time must be finite, got {t}")
            return float(t)
        return self.grid_index(t) * self.dt

    def state_at(self, t: float) -> StateVector:
        if self.is_hamiltonian:
            if not math.isfinite(t):
                raise GridError(f"time must be finite, got {t}")
            return evolve(self.hamiltonian, self.initial, t)
        k = self.grid_index(t)
        with self._lock:
            traj = self._trajectory
            while len(traj) <= k:
                traj.append(self.steps[len(traj) - 1].apply(traj[-1]))
            return traj[k]

    def propagate(self, psi: StateVector, t: float, s: float) -> StateVector:
        """Carry an arbitrary state from time `t` to time `s` under the scenario dynamics."""
        if self.is_hamiltonian:
            return evolve(self.hamiltonian, psi, s - t)
        i, j = self.grid_index(t), self.grid_index(s)
        if j < i:
            raise GridError("circuit scenarios cannot be propagated backwards")
        for st in self.steps[i:j]:
            psi = st.apply(psi)
        return psi

    def branches_at(self, t: float) -> BranchDecomposition:
        return decompose(self.state_at(t), self.basis, self.factorization)

    def remembered(self, branch: str, t: float, s: float) -> str | None:
        """Label the observer in `branch` at `t` remembers experiencing at `s <= t`, if recorded."""
        if self.records is None:
            return None
        return self.records(branch, t, s)


# --- cat models -------------------------------------------------------------

ALIVE, DEAD = 0, 1
HAPPY, SAD = "happy", "sad"


def _survival(gamma: float, t: float) -> tuple[float, float]:
    if gamma <= 0 or not math.isfinite(gamma):
        raise ValueError(f"decay rate must be positive, got {gamma}")
    if t < 0 or not math.isfinite(t):
        raise ValueError(f"time must be non-negative, got {t}")
    return math.exp(-gamma * t), math.sqrt(-math.expm1(-2.0 * gamma * t))


def build_cat_plain(gamma: float, t: float) -> StateVector:
    """e^{-gamma t}|alive> + sqrt(1 - e^{-2 gamma t})|dead>."""
    a, d = _survival(gamma, t)
    return StateVector([a, d], (2,))


def build_cat_observed(gamma: float, t: float) -> StateVector:
    """Cat entangled with a watching observer; observer factor first.

    Basis order is observer (happy, sad) x cat (alive, dead).
    """
    a, d = _survival(gamma, t)
    amps = np.zeros(4, dtype=np.complex128)
    amps[0 * 2 + ALIVE] = a
    amps[1 * 2 + DEAD] = d
    return StateVector(amps, (2, 2))


def observed_cat_basis() -> ExperienceBasis:
    return ExperienceBasis([HAPPY, SAD])


@dataclass(frozen=True)
class CatParams:
    gamma: float
    dt: float
    steps: int
    max_dim: int = MAX_DIM

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ScenarioValidationError("decay-rate", f"gamma must be positive, got {self.gamma}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ScenarioValidationError("time-bin", f"dt must be positive, got {self.dt}")
        if self.gamma * self.dt >= 1:
            raise ScenarioValidationError("conditioning", f"gamma*dt = {self.gamma * self.dt:g} must be < 1")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ScenarioValidationError("steps", f"steps must be a positive integer, got {self.steps}")
        if 2 * (self.steps + 1) > self.max_dim:
            raise CapacityError(f"{self.steps} record bins need dimension {2 * (self.steps + 1)} > {self.max_dim}")


def died_label(k: int) -> str:
    return f"died@{k}"


def _parse_died(label: str) -> int | None:
    if label.startswith("died@"):
        try:
            return int(label[5:])
        except ValueError:
            return None
    return None


def build_cat_record_circuit(p: CatParams) -> Scenario:
    """Continuously watched cat, discretized into `p.steps` bins of width `p.dt`.

    Factor 0 is the observer's record register (dimension steps+1), factor 1
    the cat.  Step k moves amplitude cos(theta) = e^{-gamma dt} of the
    surviving branch onward and sin(theta) into "died@k", so after k steps
    the "alive" amplitude is exactly e^{-gamma k dt}.
    """
    n = int(p.steps)
    c = math.exp(-p.gamma * p.dt)
    s = math.sqrt(-math.expm1(-2.0 * p.gamma * p.dt))
    dims = (n + 1, 2)
    initial = StateVector.basis(0, dims)
    basis = ExperienceBasis(["alive"] + [died_label(k) for k in range(1, n + 1)])
    dt = float(p.dt)

    def records(branch: str, t: float, s_: float) -> str | None:
        k = _parse_died(branch)
        if k is None:
            return "alive" if branch == "alive" else None
        # bin k ends at k*dt; before that the observer still saw a live cat
        return branch if s_ >= k * dt - GRID_TOL * max(1.0, k * dt) else "alive"

    return Scenario(
        name=f"cat-record(gamma={p.gamma:g}, dt={p.dt:g}, steps={n})",
        dims=dims,
        observer_factors=1,
        initial=initial,
        basis=basis,
        steps=_CatSteps(n, c, s),
        dt=dt,
        records=records,
        max_dim=p.max_dim,
    )


# --- generic measurement ----------------------------------------------------

def _completion_with_first_column(v: np.ndarray) -> np.ndarray:
    """A unitary whose first column is the unit vector `v` (phased Householder reflection)."""
    n = v.size
    phase = v[0] / abs(v[0]) if abs(v[0]) > 0 else 1.0
    y = np.conj(phase) * v  # y[0] = |v[0]| is real, so e_0 -> y is a valid reflection
    u = -y
    u[0] += 1.0
    nu = np.vdot(u, u).real
    if nu < 1e-30:
        return phase * np.eye(n, dtype=np.complex128)
    R = np.eye(n, dtype=np.complex128) - 2.0 * np.outer(u, u.conj()) / nu
    return phase * R


def build_measurement(amplitudes: Sequence[complex], labels: Sequence[str]) -> Scenario:
    """One-step measurement: |eta_0>|0> -> sum_k a_k |eta_k>|k>.

    The first label is the observer's single pre-measurement experience.
    """
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    labels = [str(x) for x in labels]
    n = amps.size
    if n < 2:
        raise ScenarioValidationError("outcomes", "a measurement needs at least two outcomes")
    if len(labels) != n:
        raise ScenarioValidationError("labels", f"{len(labels)} labels for {n} amplitudes")
    if len(set(labels)) != n:
        raise ScenarioValidationError("labels", f"duplicate labels in {labels}")
    if not np.all(np.isfinite(amps)):
        raise ScenarioValidationError("finite", "amplitudes must be finite")
    total = float(np.sum(np.abs(amps) ** 2))
    if abs(total - 1.0) > NORM_TOL:
        raise ScenarioValidationError("normalization", f"sum |a_k|^2 = {total:.12g}, expected 1")

    v = np.zeros(n * n, dtype=np.complex128)
    v[np.arange(n) * n + np.arange(n)] = amps
    v /= np.linalg.norm(v)
    U = _completion_with_first_column(v)
    return Scenario(
        name="measurement",
        dims=(n, n),
        observer_factors=1,
        initial=StateVector.basis(0, (n, n)),
        basis=ExperienceBasis(labels),
        steps=[Step(U, (0, 1))],
        dt=1.0,
    )


__all__ = [
    "CatParams",
    "RecordMap",
    "Scenario",
    "Step",
    "build_cat_observed",
    "build_cat_plain",
    "build_cat_record_circuit",
    "build_measurement",
    "died_label",
    "observed_cat_basis",
]
