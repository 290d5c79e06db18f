"""On-disk formats and named built-ins for the command-line tools.

Everything is JSON. Complex numbers are always ``[re, im]`` pairs and
matrices are row-major lists of rows, so files round-trip bit-exactly and
parse trivially from any language. States, measurement sets and protocols
can also be referred to by built-in names so the standard examples run
without hand-written files.
"""

from __future__ import annotations

import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .linalg import DEFAULT_TOL, PureState, ValidationError, bell_phi_plus, haar_state
from .measurement import MeasurementSet, noisy_pair, random_measurement_set, z_projectors
from .protocols import ProtocolSpec

STATE_NORM_ACCEPT = 1e-8
STATE_NORM_REPAIR = 1e-4


def default_tolerance() -> float:
    """Completeness tolerance for loaders; MSPACE_DEFAULT_TOL overrides it."""
    raw = os.environ.get("MSPACE_DEFAULT_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError as exc:
        raise ValidationError("tolerance-env", f"MSPACE_DEFAULT_TOL={raw!r} is not a number") from exc


def pairs_to_vector(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    try:
        return np.array([complex(re, im) for re, im in pairs], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError("complex-pairs", "amplitudes must be [re, im] pairs") from exc


def pairs_to_matrix(rows: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError("complex-pairs", "matrix entries must be [re, im] pairs") from exc


def vector_to_pairs(vec: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec, dtype=complex)]


def matrix_to_pairs(mat: np.ndarray) -> list[list[list[float]]]:
    return [vector_to_pairs(row) for row in np.asarray(mat, dtype=complex)]


def _read_json(path: str | Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError("file-access", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError("file-json", f"{path} is not valid JSON: {exc}") from exc


def state_from_obj(obj: Any) -> PureState:
    if not isinstance(obj, dict) or "dims" not in obj or "amplitudes" not in obj:
        raise ValidationError("state-schema", "state files need 'dims' and 'amplitudes'")
    dims = tuple(int(d) for d in obj["dims"])
    vec = pairs_to_vector(obj["amplitudes"])
    if vec.size != math.prod(dims):
        raise ValidationError(
            "state-length", f"{vec.size} amplitudes for dims {dims} (need {math.prod(dims)})"
        )
    norm = float(np.linalg.norm(vec))
    dev = abs(norm - 1.0)
    if dev > STATE_NORM_REPAIR:
        raise ValidationError("state-normalization", f"norm {norm!r} is too far from 1 to repair")
    if dev > STATE_NORM_ACCEPT:
        print(f"warning: state norm {norm!r} renormalized", file=sys.stderr)
    return PureState(dims, vec / norm)


def load_state(source: str, dims: Sequence[int] | None = None) -> PureState:
    """Load a state from a file path or a built-in name.

    Names: ``bell``, ``product0`` and ``random:<seed>``; the latter two take
    their shape from ``dims`` (default two qubits).
    """
    shape = tuple(int(d) for d in dims) if dims else (2, 2)
    if source == "bell":
        return bell_phi_plus()
    if source == "product0":
        return PureState.basis(shape, 0)
    if source.startswith("random:"):
        try:
            seed = int(source.split(":", 1)[1])
        except ValueError as exc:
            raise ValidationError("state-name", f"bad random state spec {source!r}") from exc
        return haar_state(shape, seed)
    return state_from_obj(_read_json(source))


def measurement_set_from_obj(obj: Any, tol: float | None = None) -> MeasurementSet:
    if not isinstance(obj, dict) or "dim" not in obj or "operators" not in obj:
        raise ValidationError("measurement-schema", "measurement files need 'dim' and 'operators'")
    dim = int(obj["dim"])
    ops = []
    for entry in obj["operators"]:
        if not isinstance(entry, dict) or "label" not in entry or "matrix" not in entry:
            raise ValidationError(
                "measurement-schema", "each operator needs 'label' and 'matrix'"
            )
        ops.append((str(entry["label"]), pairs_to_matrix(entry["matrix"])))
    mset = MeasurementSet(dim, tuple(ops))
    mset.assert_complete(default_tolerance() if tol is None else tol)
    return mset


def load_measurement_set(source: str, dim: int | None = None, tol: float | None = None) -> MeasurementSet:
    """Load a measurement set from a file path or a built-in family name.

    Families: ``z-projectors`` (dimension from context), ``noisy:<eta>``
    (qubit pair) and ``random:<outcomes>:<seed>``.
    """
    if source == "z-projectors":
        return z_projectors(dim or 2)
    if source.startswith("noisy:"):
        try:
            eta = float(source.split(":", 1)[1])
        except ValueError as exc:
            raise ValidationError("measurement-name", f"bad noisy spec {source!r}") from exc
        return noisy_pair(eta)
    if source.startswith("random:"):
        parts = source.split(":")
        if len(parts) != 3:
            raise ValidationError(
                "measurement-name", f"random sets are 'random:<outcomes>:<seed>', got {source!r}"
            )
        try:
            outcomes, seed = int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ValidationError("measurement-name", f"bad random set spec {source!r}") from exc
        return random_measurement_set(dim or 2, outcomes, seed)
    return measurement_set_from_obj(_read_json(source), tol)


def load_protocol(path: str) -> ProtocolSpec:
    """Load a protocol file: state, Alice's set, Bob's unitaries, verify pairs."""
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise ValidationError("protocol-schema", "protocol files must be JSON objects")
    for key in ("state", "alice", "bob_unitaries", "verify"):
        if key not in obj:
            raise ValidationError("protocol-schema", f"protocol files need {key!r}")
    state_obj = obj["state"]
    state = load_state(state_obj) if isinstance(state_obj, str) else state_from_obj(state_obj)
    alice = measurement_set_from_obj(obj["alice"])
    unitaries = tuple(pairs_to_matrix(rows) for rows in obj["bob_unitaries"])
    verify_obj = obj["verify"]
    pairs = []
    for label in alice.labels:
        if label not in verify_obj:
            raise ValidationError("protocol-verify", f"no verify pair for Alice label {label!r}")
        entry = verify_obj[label]
        if "success" not in entry or "failure" not in entry:
            raise ValidationError(
                "protocol-verify", f"verify pair {label!r} needs 'success' and 'failure'"
            )
        pairs.append((pairs_to_matrix(entry["success"]), pairs_to_matrix(entry["failure"])))
    return ProtocolSpec(state, alice, unitaries, tuple(pairs))


def state_to_obj(psi: PureState) -> dict:
    return {"dims": list(psi.dims), "amplitudes": vector_to_pairs(psi.vector)}


def measurement_set_to_obj(mset: MeasurementSet) -> dict:
    return {
        "dim": mset.dim,
        "operators": [
            {"label": label, "matrix": matrix_to_pairs(op)} for label, op in mset.operators
        ],
    }
