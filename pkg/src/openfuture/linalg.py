"""Dense complex linear algebra on tensor-factored Hilbert spaces.

Everything here is immutable: arrays handed to a `StateVector` or
`HermitianOperator` are copied and marked read-only, so values can be
shared freely between threads.  Units have hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import CapacityError, DimensionError, NotHermitianError, NotUnitaryError

MAX_DIM = 2**20

HERMITICITY_TOL = 1e-10
UNITARITY_TOL = 1e-10
NORM_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def _check_capacity(total: int, max_dim: int) -> None:
    if total > max_dim:
        raise CapacityError(f"total dimension {total} exceeds maximum {max_dim}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over the tensor product of factors with dimensions `dims`."""

    dims: tuple[int, ...]
    amps: np.ndarray = field(repr=False)

    def __init__(self, amps, dims: Sequence[int] | None = None):
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        dims = (amps.size,) if dims is None else tuple(int(d) for d in dims)
        if any(d <= 0 for d in dims):
            raise DimensionError(f"factor dimensions must be positive, got {dims}")
        if int(np.prod(dims)) != amps.size:
            raise DimensionError(f"{amps.size} amplitudes do not fit dims {dims}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state amplitudes must be finite")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", _frozen(amps))

    @classmethod
    def basis(cls, index: int, dims: Sequence[int] | int) -> "StateVector":
        dims = (dims,) if isinstance(dims, int) else tuple(dims)
        amps = np.zeros(int(np.prod(dims)), dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, dims)

    @classmethod
    def zeros(cls, dims: Sequence[int] | int) -> "StateVector":
        dims = (dims,) if isinstance(dims, int) else tuple(dims)
        return cls(np.zeros(int(np.prod(dims)), dtype=np.complex128), dims)

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amps / n, self.dims)

    def scaled(self, c: complex) -> "StateVector":
        return StateVector(self.amps * c, self.dims)

    def __add__(self, other: "StateVector") -> "StateVector":
        if other.dims != self.dims:
            raise DimensionError(f"cannot add states with dims {self.dims} and {other.dims}")
        return StateVector(self.amps + other.amps, self.dims)

    def allclose(self, other: "StateVector", atol: float = NORM_TOL) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.amps, other.amps, rtol=0.0, atol=atol))

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape(self.dims)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray = field(repr=False)

    def __init__(self, matrix, tol: float = HERMITICITY_TOL):
        m = np.asarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if dev > tol:
            raise NotHermitianError(f"max |M - M^dagger| = {dev:.3g} exceeds {tol:g}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        # symmetrize so eigh sees an exactly Hermitian matrix
        m = 0.5 * (self.matrix + self.matrix.conj().T)
        try:
            w, v = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise NotHermitianError(f"eigendecomposition failed: {exc}") from exc
        return w, v

    def propagator(self, dt: float) -> np.ndarray:
        """Dense matrix exp(-i H dt)."""
        w, v = self.eigh
        return (v * np.exp(-1j * w * dt)) @ v.conj().T


def tensor(a: StateVector, b: StateVector, max_dim: int = MAX_DIM) -> StateVector:
    _check_capacity(a.dim * b.dim, max_dim)
    return StateVector(np.kron(a.amps, b.amps), a.dims + b.dims)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dim != b.dim:
        raise DimensionError(f"inner product of dimensions {a.dim} and {b.dim}")
    return complex(np.vdot(a.amps, b.amps))


def evolve(H: HermitianOperator, psi: StateVector, dt: float) -> StateVector:
    """exp(-i H dt) psi via the eigendecomposition of H. Negative dt runs backwards."""
    if H.dim != psi.dim:
        raise DimensionError(f"operator dimension {H.dim} does not match state dimension {psi.dim}")
    if not np.isfinite(dt):
        raise ValueError(f"time step must be finite, got {dt}")
    if dt == 0:
        return psi
    w, v = H.eigh
    coeffs = v.conj().T @ psi.amps
    return StateVector(v @ (np.exp(-1j * w * dt) * coeffs), psi.dims)


def check_unitary(U: np.ndarray, tol: float = UNITARITY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=np.complex128)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NotUnitaryError(f"unitary must be square, got shape {U.shape}")
    if not np.all(np.isfinite(U)):
        raise NotUnitaryError("unitary entries must be finite")
    dev = float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))) if U.size else 0.0
    if dev > tol:
        raise NotUnitaryError(f"max |U^dagger U - I| = {dev:.3g} exceeds {tol:g}")
    return U


def apply_unitary(
    U: np.ndarray,
    psi: StateVector,
    targets: Sequence[int],
    check: bool = True,
) -> StateVector:
    """Apply `U` to the tensor factors `targets` of `psi`, identity elsewhere.

    The row/column index of `U` runs over the target factors in the order
    given, most significant first.
    """
    targets = tuple(int(k) for k in targets)
    n = len(psi.dims)
    if not targets or len(set(targets)) != len(targets) or any(k < 0 or k >= n for k in targets):
        raise IndexError(f"bad target factors {targets} for a state with {n} factors")
    tdims = tuple(psi.dims[k] for k in targets)
    tdim = int(np.prod(tdims))
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (tdim, tdim):
        raise DimensionError(f"unitary of shape {U.shape} does not act on target dims {tdims}")
    if check:
        check_unitary(U)

    rest = [k for k in range(n) if k not in targets]
    order = list(targets) + rest
    t = np.transpose(psi.tensor_view(), order).reshape(tdim, -1)
    t = (U @ t).reshape(tdims + tuple(psi.dims[k] for k in rest))
    out = np.transpose(t, np.argsort(order))
    return StateVector(out.reshape(-1), psi.dims)
