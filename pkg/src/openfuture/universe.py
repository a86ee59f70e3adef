"""Observer factorization and branch decomposition of a universal state.

With H_U = H_S (x) H_E and an orthonormal experience basis {eta_n} of H_S,
every universal state splits uniquely as

    Psi = sum_n eta_n (x) Phi_n,     Phi_n = (<eta_n| (x) I_E) Psi.

The relative states Phi_n are kept unnormalized; their squared norms are
the branch weights.  The observer is always the leading factor group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, LabelError
from .linalg import HERMITICITY_TOL, StateVector, tensor

REALITY_EPS = 1e-12


@dataclass(frozen=True)
class Factorization:
    dim_S: int
    dim_E: int

    def __post_init__(self):
        if self.dim_S <= 0 or self.dim_E <= 0:
            raise DimensionError(f"factor dimensions must be positive: {self.dim_S}, {self.dim_E}")

    @property
    def total(self) -> int:
        return self.dim_S * self.dim_E

    @classmethod
    def from_dims(cls, dims: Sequence[int], observer_factors: int) -> "Factorization":
        """Split `dims` after the first `observer_factors` factors."""
        if not 0 < observer_factors <= len(dims):
            raise DimensionError(f"cannot take {observer_factors} observer factors from dims {tuple(dims)}")
        return cls(int(np.prod(dims[:observer_factors])), int(np.prod(dims[observer_factors:])))


@dataclass(frozen=True, eq=False)
class ExperienceBasis:
    """Labeled orthonormal basis of the observer space.

    `matrix` holds the basis vectors as columns.
    """

    labels: tuple[str, ...]
    matrix: np.ndarray = field(repr=False)
    dims: tuple[int, ...] = ()

    def __init__(self, labels: Sequence[str], vectors=None, dims: Sequence[int] | None = None,
                 tol: float = HERMITICITY_TOL):
        labels = tuple(str(lab) for lab in labels)
        n = len(labels)
        if n == 0:
            raise ValueError("experience basis needs at least one label")
        if len(set(labels)) != n:
            raise ValueError(f"experience labels must be distinct: {labels}")
        if any(not lab for lab in labels):
            raise ValueError("experience labels must be nonempty")
        if vectors is None:
            m = np.eye(n, dtype=np.complex128)
        else:
            cols = [v.amps if isinstance(v, StateVector) else np.asarray(v, dtype=np.complex128).reshape(-1)
                    for v in vectors]
            if len(cols) != n:
                raise DimensionError(f"{len(cols)} basis vectors for {n} labels")
            if any(c.size != n for c in cols):
                raise DimensionError(f"basis vectors must have dimension {n}")
            m = np.stack(cols, axis=1).astype(np.complex128)
        if not np.all(np.isfinite(m)):
            raise ValueError("basis vectors must be finite")
        dev = float(np.max(np.abs(m.conj().T @ m - np.eye(n))))
        if dev > tol:
            raise ValueError(f"experience basis is not orthonormal (max deviation {dev:.3g})")
        dims = (n,) if dims is None else tuple(int(d) for d in dims)
        if int(np.prod(dims)) != n:
            raise DimensionError(f"basis dims {dims} do not multiply to {n}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"unknown experience label {label!r}; known: {', '.join(self.labels)}") from None

    def vector(self, label: str) -> StateVector:
        return StateVector(self.matrix[:, self.index(label)], self.dims)


@dataclass(frozen=True, eq=False)
class Branch:
    label: str
    state: StateVector
    weight: float


@dataclass(frozen=True, eq=False)
class BranchDecomposition:
    entries: tuple[Branch, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.entries)

    @property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.entries])

    def __getitem__(self, label: str) -> Branch:
        for b in self.entries:
            if b.label == label:
                return b
        raise LabelError(f"no branch labeled {label!r}")

    def weight(self, label: str) -> float:
        return self[label].weight


def _env_dims(psi: StateVector, f: Factorization) -> tuple[int, ...]:
    # Recover the environment's factor structure when the split falls on a factor boundary.
    acc = 1
    for k, d in enumerate(psi.dims):
        if acc == f.dim_S:
            return psi.dims[k:]
        acc *= d
    return (f.dim_E,)


def decompose(psi: StateVector, basis: ExperienceBasis, f: Factorization) -> BranchDecomposition:
    if psi.dim != f.total:
        raise DimensionError(f"state dimension {psi.dim} != {f.dim_S} x {f.dim_E}")
    if len(basis) != f.dim_S:
        raise DimensionError(f"basis has {len(basis)} vectors, observer dimension is {f.dim_S}")
    env_dims = _env_dims(psi, f)
    rel = basis.matrix.conj().T @ psi.amps.reshape(f.dim_S, f.dim_E)
    weights = np.einsum("ij,ij->i", rel.conj(), rel).real
    return BranchDecomposition(tuple(
        Branch(lab, StateVector(rel[i], env_dims), float(weights[i]))
        for i, lab in enumerate(basis.labels)
    ))


def reconstruct(d: BranchDecomposition, basis: ExperienceBasis) -> StateVector:
    if tuple(d.labels) != basis.labels:
        raise LabelError(f"decomposition labels {d.labels} do not match basis labels {basis.labels}")
    out = None
    for b in d.entries:
        term = tensor(basis.vector(b.label), b.state)
        out = term if out is None else out + term
    return out


def real_experiences(d: BranchDecomposition, eps: float = REALITY_EPS) -> list[str]:
    """Labels whose relative state is non-null, heaviest first (stable on ties)."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    live = [(i, b) for i, b in enumerate(d.entries) if b.weight > eps]
    live.sort(key=lambda ib: (-ib[1].weight, ib[0]))
    return [b.label for _, b in live]
