"""Entanglement measures on bipartite pure states and measurement-space images.

All entropic quantities use base-2 logarithms, so a maximally entangled qubit
pair scores exactly 1. Concurrence follows the standard two-qubit closed
forms: ``2|a00 a11 - a01 a10|`` for pure states and the descending-lambda
eigenvalue formula for mixed states.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence

import numpy as np

from .linalg import PAULI_Y, DensityMatrix, PureState, ValidationError, schmidt, tensor
from .measurement import LocalMeasurementSet, MeasurementSpaceState, map_to_measurement_space

_YY = tensor(PAULI_Y, PAULI_Y)


def binary_entropy(p: float) -> float:
    """Shannon entropy (bits) of a {p, 1-p} distribution, with 0 log 0 := 0."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError("entropy-domain", f"p must lie in [0, 1], got {p!r}")
    h = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            h -= q * math.log2(q)
    return h


def shannon_entropy(probs: Sequence[float]) -> float:
    h = 0.0
    for q in probs:
        if q > 0.0:
            h -= q * math.log2(q)
    return max(h, 0.0)


def entropy_of_entanglement(
    psi: PureState, split: tuple[Sequence[int], Sequence[int]] | None = None
) -> float:
    """Entropy (bits) of the squared Schmidt coefficients across a bipartition.

    ``split`` defaults to the first subsystem against the rest.
    """
    if split is None:
        split = ((0,), tuple(range(1, len(psi.dims))))
    coeffs, _, _ = schmidt(psi, split)
    return shannon_entropy(coeffs**2)


def concurrence_pure(psi: PureState) -> float:
    """Concurrence of a two-qubit pure state: 2 |a00 a11 - a01 a10|."""
    if psi.dims != (2, 2):
        raise ValidationError("concurrence-dims", f"need a 2x2 pure state, got dims {psi.dims}")
    a = psi.reshaped()
    return float(2.0 * abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]))


def _sqrtm_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence_mixed(rho: DensityMatrix) -> float:
    """Concurrence of a two-qubit density matrix.

    C = max(0, l1 - l2 - l3 - l4) with the l_i the descending square roots of
    the eigenvalues of rho (Y x Y) rho* (Y x Y). Those eigenvalues equal the
    squared singular values of sqrt(rho) (Y x Y) sqrt(rho)*, and the SVD is
    numerically stabler than the eigenvalues of the non-Hermitian product.
    """
    if rho.dims != (2, 2):
        raise ValidationError("concurrence-dims", f"need a 2x2 density matrix, got {rho.dims}")
    s = _sqrtm_psd(rho.matrix)
    lam = np.linalg.svd(s @ _YY @ s.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(c: float) -> float:
    """Entanglement of formation (bits) of a two-qubit state with concurrence c."""
    if not 0.0 <= c <= 1.0 + 1e-12:
        raise ValidationError("concurrence-range", f"concurrence must lie in [0, 1], got {c!r}")
    c = min(c, 1.0)
    return binary_entropy((1.0 + math.sqrt(1.0 - c * c)) / 2.0)


MEASURES = ("entropy", "concurrence", "eof")


@dataclasses.dataclass(frozen=True)
class EntanglementReport:
    measure: str
    value: float
    split: tuple[int, int]
    input_descriptor: str

    def __post_init__(self):
        na, nb = self.split
        if self.measure == "concurrence" and not -1e-12 <= self.value <= 1.0 + 1e-12:
            raise ValidationError("report-range", f"concurrence {self.value!r} outside [0, 1]")
        if self.measure in ("entropy", "eof"):
            cap = math.log2(min(na, nb)) + 1e-9
            if not -1e-12 <= self.value <= cap:
                raise ValidationError(
                    "report-range", f"{self.measure} value {self.value!r} outside [0, {cap!r}]"
                )


def measurement_space_entanglement(
    ms: MeasurementSpaceState,
    measure: str = "entropy",
    split: tuple[int, int] | None = None,
) -> float:
    """Apply an entanglement measure to a measurement-space state.

    Needs a bipartite outcome structure, either attached to ``ms`` or given
    explicitly. Concurrence and entanglement of formation require a 2x2
    outcome grid.
    """
    if measure not in MEASURES:
        raise ValidationError("measure-name", f"unknown measure {measure!r}; use {MEASURES}")
    state = ms.as_pure_state(split)
    if measure == "entropy":
        return entropy_of_entanglement(state, ((0,), (1,)))
    if state.dims != (2, 2):
        raise ValidationError(
            "concurrence-dims",
            f"{measure} needs a 2x2 outcome grid, got {state.dims}",
        )
    c = concurrence_pure(state)
    return c if measure == "concurrence" else eof_from_concurrence(c)


def operational_entanglement(
    psi: PureState,
    measurements: LocalMeasurementSet,
    measure: str = "entropy",
    descriptor: str = "",
) -> EntanglementReport:
    """Entanglement of the measurement-space image of ``psi``.

    Maps the state through the joint local set and evaluates the chosen
    measure across the (Alice outcomes | Bob outcomes) cut.
    """
    ms = map_to_measurement_space(psi, measurements)
    assert ms.structure is not None
    value = measurement_space_entanglement(ms, measure)
    return EntanglementReport(
        measure=measure,
        value=value,
        split=ms.structure,
        input_descriptor=descriptor or f"state dims {psi.dims}",
    )
