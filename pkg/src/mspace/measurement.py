"""Generalized measurement sets and the map into measurement space.

A measurement set is an ordered list of labeled operators ``M_m`` acting on
one Hilbert space, complete in the sense ``sum_m M_m^dag M_m = 1``. The
measurement-space image of a state is the vector of square roots of the
outcome probabilities, one orthonormal axis per outcome. For a pair of local
sets the joint outcome grid is recorded so the image can be read as a
bipartite state.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    PureState,
    ValidationError,
    _as_rng,
    haar_unitary,
    tensor,
)

PROBABILITY_FLOOR = -1e-12


@dataclasses.dataclass(frozen=True)
class MeasurementSet:
    """Ordered, labeled measurement operators on a single space.

    Structural invariants (shapes, unique labels) are enforced at
    construction. Completeness is checked by the operations that rely on it,
    so that an incomplete set can still be built and inspected with
    :func:`validate_completeness`.
    """

    dim: int
    operators: tuple[tuple[str, np.ndarray], ...]

    def __post_init__(self):
        dim = int(self.dim)
        ops = tuple((str(label), np.asarray(op, dtype=complex)) for label, op in self.operators)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "operators", ops)
        if dim < 1:
            raise ValidationError("measurement-dim", f"dimension must be >= 1, got {dim}")
        if not ops:
            raise ValidationError("measurement-empty", "a measurement set needs >= 1 operator")
        for label, op in ops:
            if op.shape != (dim, dim):
                raise ValidationError(
                    "measurement-shape",
                    f"operator {label!r} has shape {op.shape}, expected {(dim, dim)}",
                )
        labels = [label for label, _ in ops]
        if len(set(labels)) != len(labels):
            raise ValidationError("measurement-labels", f"labels are not unique: {labels}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.operators)

    @property
    def matrices(self) -> tuple[np.ndarray, ...]:
        return tuple(op for _, op in self.operators)

    def __len__(self) -> int:
        return len(self.operators)

    def completeness_deviation(self) -> float:
        """Max-norm of sum_m M_m^dag M_m - 1."""
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for _, op in self.operators:
            acc += op.conj().T @ op
        return float(np.max(np.abs(acc - np.eye(self.dim))))

    def assert_complete(self, tol: float = DEFAULT_TOL) -> None:
        dev = self.completeness_deviation()
        if dev > tol:
            raise ValidationError(
                "completeness",
                f"completeness deviation {dev!r} exceeds tolerance {tol!r}",
            )


@dataclasses.dataclass(frozen=True)
class CompletenessReport:
    deviation: float
    tolerance: float
    passed: bool


def validate_completeness(mset: MeasurementSet, tol: float = DEFAULT_TOL) -> CompletenessReport:
    """Report how far a set is from satisfying sum_m M_m^dag M_m = 1."""
    dev = mset.completeness_deviation()
    return CompletenessReport(deviation=dev, tolerance=float(tol), passed=dev <= tol)


@dataclasses.dataclass(frozen=True)
class LocalMeasurementSet:
    """A pair of measurement sets, one for each party of a bipartite system.

    The joint outcome set is the Cartesian product, labeled ``(m_A,m_B)`` and
    ordered row-major with Alice's outcome as the most significant index.
    """

    alice: MeasurementSet
    bob: MeasurementSet

    @property
    def structure(self) -> tuple[int, int]:
        return (len(self.alice), len(self.bob))

    def joint(self) -> MeasurementSet:
        ops = []
        for la, ma in self.alice.operators:
            for lb, mb in self.bob.operators:
                ops.append((f"({la},{lb})", tensor(ma, mb)))
        return MeasurementSet(self.alice.dim * self.bob.dim, tuple(ops))


@dataclasses.dataclass(frozen=True)
class MeasurementSpaceState:
    """Image of a state in measurement space.

    Amplitudes are the nonnegative square roots of the outcome probabilities,
    listed in the measurement set's label order. ``structure`` is present
    when the outcomes form an (Alice x Bob) grid.
    """

    outcome_labels: tuple[str, ...]
    amplitudes: np.ndarray
    structure: tuple[int, int] | None = None

    def __post_init__(self):
        labels = tuple(str(s) for s in self.outcome_labels)
        amps = np.asarray(self.amplitudes, dtype=float)
        object.__setattr__(self, "outcome_labels", labels)
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or amps.size != len(labels):
            raise ValidationError(
                "mspace-shape", f"{len(labels)} labels but {amps.size} amplitudes"
            )
        if np.any(amps < 0):
            raise ValidationError("mspace-nonnegative", "amplitudes must be >= 0")
        total = float(np.sum(amps**2))
        if abs(total - 1.0) > DEFAULT_TOL:
            raise ValidationError(
                "mspace-normalization", f"squared amplitudes sum to {total!r}, expected 1"
            )
        if self.structure is not None:
            na, nb = (int(x) for x in self.structure)
            object.__setattr__(self, "structure", (na, nb))
            if na * nb != amps.size:
                raise ValidationError(
                    "mspace-structure",
                    f"structure {na}x{nb} does not match {amps.size} outcomes",
                )

    def probabilities(self) -> np.ndarray:
        return self.amplitudes**2

    def as_pure_state(self, split: tuple[int, int] | None = None) -> PureState:
        """View the image as a bipartite pure state.

        Uses the attached outcome structure, or an explicit factorization of
        the outcome count. Without either there is no canonical bipartition,
        so the call is rejected.
        """
        shape = split if split is not None else self.structure
        if shape is None:
            raise ValidationError(
                "mspace-factorization",
                "no bipartite structure attached; supply an explicit outcome factorization",
            )
        na, nb = (int(x) for x in shape)
        if na * nb != self.amplitudes.size:
            raise ValidationError(
                "mspace-factorization",
                f"{na}x{nb} does not factor {self.amplitudes.size} outcomes",
            )
        return PureState((na, nb), self.amplitudes.astype(complex))


def outcome_probabilities(
    psi: PureState,
    mset: MeasurementSet,
    completeness_tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """Outcome distribution p_m = <psi| M_m^dag M_m |psi>.

    Each probability is clamped to [0, 1] after a -1e-12 floor check and the
    distribution must sum to 1 within 1e-10, which completeness guarantees.
    """
    if psi.dim != mset.dim:
        raise ValidationError(
            "dimension-match",
            f"state dimension {psi.dim} != measurement dimension {mset.dim}",
        )
    mset.assert_complete(completeness_tol)
    probs = np.empty(len(mset), dtype=float)
    for i, (_, op) in enumerate(mset.operators):
        p = float(np.real(np.vdot(psi.vector, op.conj().T @ (op @ psi.vector))))
        if p < PROBABILITY_FLOOR:
            raise ValidationError("probability-floor", f"outcome probability {p!r} < -1e-12")
        probs[i] = min(max(p, 0.0), 1.0)
    total = float(probs.sum())
    # a completeness deviation of eps can push the sum off by up to dim * eps
    sum_tol = max(DEFAULT_TOL, completeness_tol * mset.dim)
    if abs(total - 1.0) > sum_tol:
        raise ValidationError(
            "probability-normalization", f"probabilities sum to {total!r}, expected 1"
        )
    return probs


def map_to_measurement_space(
    psi: PureState,
    measurements: MeasurementSet | LocalMeasurementSet,
    completeness_tol: float = DEFAULT_TOL,
) -> MeasurementSpaceState:
    """Map a pure state to the vector of square-root outcome probabilities.

    With a :class:`LocalMeasurementSet` the joint product set is used and the
    (Alice x Bob) outcome structure is attached to the result.
    """
    structure = None
    if isinstance(measurements, LocalMeasurementSet):
        structure = measurements.structure
        measurements = measurements.joint()
    probs = outcome_probabilities(psi, measurements, completeness_tol)
    amplitudes = np.sqrt(probs)
    # when the completeness tolerance is loosened the raw probabilities may
    # miss unit sum by up to that amount; the image itself stays a unit vector
    amplitudes /= np.linalg.norm(amplitudes)
    return MeasurementSpaceState(measurements.labels, amplitudes, structure)


def random_measurement_set(
    dim: int,
    n_outcomes: int,
    seed: int | np.random.Generator,
    label_prefix: str = "",
) -> MeasurementSet:
    """Random complete measurement set with ``n_outcomes`` operators.

    Slices the first block-column of a Haar unitary of size
    ``(n_outcomes * dim)`` into ``dim x dim`` blocks, which satisfies the
    completeness identity up to floating-point error by construction.
    """
    if n_outcomes < 1:
        raise ValidationError("measurement-outcomes", "need at least one outcome")
    u = haar_unitary(n_outcomes * dim, _as_rng(seed))
    ops = tuple(
        (f"{label_prefix}{m}", u[m * dim : (m + 1) * dim, :dim]) for m in range(n_outcomes)
    )
    return MeasurementSet(dim, ops)


def z_projectors(dim: int = 2) -> MeasurementSet:
    """Rank-1 projectors onto the computational basis."""
    ops = []
    for i in range(dim):
        p = np.zeros((dim, dim), dtype=complex)
        p[i, i] = 1.0
        ops.append((str(i), p))
    return MeasurementSet(dim, tuple(ops))


def noisy_pair(eta: float) -> MeasurementSet:
    """Two-outcome qubit measurement with detector efficiency ``eta``.

    At eta = 1 this is the pair of computational-basis projectors; at
    eta = 1/2 both outcomes carry no information about the state.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError("noisy-eta", f"eta must lie in [0, 1], got {eta!r}")
    m0 = np.diag([math.sqrt(eta), math.sqrt(1.0 - eta)]).astype(complex)
    m1 = np.diag([math.sqrt(1.0 - eta), math.sqrt(eta)]).astype(complex)
    return MeasurementSet(2, (("0", m0), ("1", m1)))


def local_set(alice: MeasurementSet, bob: MeasurementSet) -> LocalMeasurementSet:
    return LocalMeasurementSet(alice, bob)


def random_local_set(
    dim_a: int,
    dim_b: int,
    n_a: int,
    n_b: int,
    seed: int | np.random.Generator,
) -> LocalMeasurementSet:
    rng = _as_rng(seed)
    return LocalMeasurementSet(
        random_measurement_set(dim_a, n_a, rng),
        random_measurement_set(dim_b, n_b, rng),
    )
