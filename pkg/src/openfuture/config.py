"""Scenario configuration files (JSON).

Example::

    {
      "name": "spin flip",
      "dims": [2, 3],
      "observer_dims": [2],
      "initial": [[1, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]],
      "dynamics": {"hamiltonian": [[[0, 0], ...], ...]},
      "basis": {"labels": ["up", "down"]}
    }

`dynamics` may instead be ``{"steps": [{"unitary": M, "targets": [0]}], "dt": 0.5}``.
Complex numbers are ``[re, im]`` pairs (a bare real is accepted too);
matrices are row-major lists of rows.  `basis.vectors` defaults to the
computational basis of the observer factors.  NaN and Infinity are rejected.
"""

from __future__ import annotations

import json
import math
import re
from typing import Any

import numpy as np

from .errors import (
    CapacityError,
    ConfigParseError,
    NotHermitianError,
    NotUnitaryError,
    ScenarioValidationError,
)
from .linalg import HERMITICITY_TOL, HermitianOperator, StateVector
from .scenarios import Scenario, Step
from .universe import ExperienceBasis


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _NonFinite(ValueError):
    pass


def _reject_constant(name: str):
    raise _NonFinite(name)


def parse_config(text: str) -> dict:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, exc.lineno, exc.colno) from None
    except _NonFinite as exc:
        m = re.search(rf"(?<![\w\"]){re.escape(str(exc))}", text)
        line, col = _line_col(text, m.start() if m else 0)
        raise ConfigParseError(f"non-finite number {exc} is not allowed", line, col) from None
    if not isinstance(doc, dict):
        raise ConfigParseError("top level must be an object", 1, 1)
    return doc


def _field(doc: dict, key: str, where: str = "") -> Any:
    if key not in doc:
        raise ScenarioValidationError("schema", f"missing field {where}{key!r}")
    return doc[key]


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _complex(x, where: str) -> complex:
    if _is_real(x):
        z = complex(x)
    elif isinstance(x, list) and len(x) == 2 and all(_is_real(v) for v in x):
        z = complex(x[0], x[1])
    else:
        raise ScenarioValidationError("schema", f"{where}: expected [re, im] or a number, got {x!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ScenarioValidationError("finite", f"{where}: non-finite value")
    return z


def _vector(x, where: str) -> np.ndarray:
    if not isinstance(x, list):
        raise ScenarioValidationError("schema", f"{where}: expected a list of amplitudes")
    return np.array([_complex(v, f"{where}[{i}]") for i, v in enumerate(x)], dtype=np.complex128)


def _matrix(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ScenarioValidationError("schema", f"{where}: expected a non-empty list of rows")
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(x)]
    n = len(rows)
    if any(r.size != n for r in rows):
        raise ScenarioValidationError("dimension", f"{where}: matrix must be square ({n} rows)")
    return np.stack(rows)


def _int_list(x, where: str) -> list[int]:
    if not isinstance(x, list) or not x or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise ScenarioValidationError("schema", f"{where}: expected a non-empty list of integers")
    return list(x)


def scenario_from_dict(doc: dict) -> Scenario:
    name = _field(doc, "name")
    if not isinstance(name, str):
        raise ScenarioValidationError("schema", "'name' must be a string")
    dims = _int_list(_field(doc, "dims"), "dims")
    if any(d <= 0 for d in dims):
        raise ScenarioValidationError("dimension", f"dims must be positive, got {dims}")
    obs = _int_list(_field(doc, "observer_dims"), "observer_dims")
    if obs != dims[: len(obs)]:
        raise ScenarioValidationError("dimension", f"observer_dims {obs} must be a leading prefix of dims {dims}")
    total = int(np.prod(dims))
    dim_S = int(np.prod(obs))

    initial = _vector(_field(doc, "initial"), "initial")
    if initial.size != total:
        raise ScenarioValidationError("dimension", f"initial has {initial.size} amplitudes, dims require {total}")

    basis_doc = _field(doc, "basis")
    if not isinstance(basis_doc, dict):
        raise ScenarioValidationError("schema", "'basis' must be an object")
    labels = _field(basis_doc, "labels", "basis.")
    if not isinstance(labels, list) or not all(isinstance(x, str) and x for x in labels):
        raise ScenarioValidationError("schema", "basis.labels must be a list of nonempty strings")
    if len(set(labels)) != len(labels):
        raise ScenarioValidationError("labels", f"duplicate experience labels in {labels}")
    if len(labels) != dim_S:
        raise ScenarioValidationError("dimension", f"{len(labels)} labels for observer dimension {dim_S}")
    vectors = None
    if basis_doc.get("vectors") is not None:
        raw = basis_doc["vectors"]
        if not isinstance(raw, list) or len(raw) != dim_S:
            raise ScenarioValidationError("dimension", f"basis.vectors must hold {dim_S} vectors")
        vectors = [_vector(v, f"basis.vectors[{i}]") for i, v in enumerate(raw)]
        if any(v.size != dim_S for v in vectors):
            raise ScenarioValidationError("dimension", f"basis vectors must have dimension {dim_S}")
        m = np.stack(vectors, axis=1)
        dev = float(np.max(np.abs(m.conj().T @ m - np.eye(dim_S))))
        if dev > HERMITICITY_TOL:
            raise ScenarioValidationError("orthonormality", f"basis vectors deviate from orthonormal by {dev:.3g}")
    basis = ExperienceBasis(labels, vectors, obs)

    dyn = _field(doc, "dynamics")
    if not isinstance(dyn, dict) or ("hamiltonian" in dyn) == ("steps" in dyn):
        raise ScenarioValidationError("schema", "dynamics must contain exactly one of 'hamiltonian' or 'steps'")
    kwargs: dict[str, Any] = {}
    if "hamiltonian" in dyn:
        H = _matrix(dyn["hamiltonian"], "dynamics.hamiltonian")
        if H.shape[0] != total:
            raise ScenarioValidationError("dimension", f"Hamiltonian is {H.shape[0]}x{H.shape[0]}, dims require {total}")
        try:
            kwargs["hamiltonian"] = HermitianOperator(H)
        except NotHermitianError as exc:
            raise ScenarioValidationError("hermiticity", str(exc)) from None
    else:
        dt = _field(dyn, "dt", "dynamics.")
        if not _is_real(dt) or not math.isfinite(dt) or dt <= 0:
            raise ScenarioValidationError("dynamics", f"dynamics.dt must be a positive number, got {dt!r}")
        raw_steps = dyn["steps"]
        if not isinstance(raw_steps, list):
            raise ScenarioValidationError("schema", "dynamics.steps must be a list")
        steps = []
        for i, st in enumerate(raw_steps):
            where = f"dynamics.steps[{i}]"
            if not isinstance(st, dict):
                raise ScenarioValidationError("schema", f"{where} must be an object")
            U = _matrix(_field(st, "unitary", where + "."), where + ".unitary")
            targets = _int_list(_field(st, "targets", where + "."), where + ".targets")
            if any(k < 0 or k >= len(dims) for k in targets) or len(set(targets)) != len(targets):
                raise ScenarioValidationError("targets", f"{where}: bad target factors {targets}")
            tdim = int(np.prod([dims[k] for k in targets]))
            if U.shape[0] != tdim:
                raise ScenarioValidationError("dimension", f"{where}: unitary is {U.shape[0]}x{U.shape[0]}, "
                                                           f"targets need {tdim}")
            try:
                steps.append(Step(U, targets))
            except NotUnitaryError as exc:
                raise ScenarioValidationError("unitarity", f"{where}: {exc}") from None
        kwargs["steps"] = steps
        kwargs["dt"] = float(dt)

    try:
        return Scenario(name, dims, len(obs), StateVector(initial, dims), basis, **kwargs)
    except CapacityError as exc:
        raise ScenarioValidationError("capacity", str(exc)) from None


def load_scenario(config_text: str) -> Scenario:
    """Parse and fully validate a scenario config document."""
    return scenario_from_dict(parse_config(config_text))


def _pairs(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a).reshape(-1)]


def scenario_to_dict(sc: Scenario) -> dict:
    """Inverse of `scenario_from_dict` for scenarios with serializable dynamics (no record maps)."""
    n_obs, acc = 1, sc.dims[0]
    while acc != sc.factorization.dim_S:
        acc *= sc.dims[n_obs]
        n_obs += 1
    doc: dict[str, Any] = {
        "name": sc.name,
        "dims": list(sc.dims),
        "observer_dims": list(sc.dims[:n_obs]),
        "initial": _pairs(sc.initial.amps),
        "basis": {"labels": list(sc.basis.labels),
                  "vectors": [_pairs(sc.basis.matrix[:, i]) for i in range(len(sc.basis))]},
    }
    if sc.is_hamiltonian:
        doc["dynamics"] = {"hamiltonian": [_pairs(row) for row in sc.hamiltonian.matrix]}
    else:
        doc["dynamics"] = {"dt": sc.dt, "steps": [
            {"unitary": [_pairs(row) for row in st.unitary], "targets": list(st.targets)} for st in sc.steps]}
    return doc


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2)
