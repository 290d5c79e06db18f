"""Measurement sets and the measurement-space map."""

import numpy as np
import pytest

from mspace.linalg import PureState, ValidationError, bell_phi_plus, haar_state, haar_unitary
from mspace.measurement import (
    LocalMeasurementSet,
    MeasurementSet,
    MeasurementSpaceState,
    map_to_measurement_space,
    noisy_pair,
    outcome_probabilities,
    random_local_set,
    random_measurement_set,
    validate_completeness,
    z_projectors,
)


def expectation_oracle(psi_vec, op):
    """<psi| op^dag op |psi> with explicit index sums."""
    d = psi_vec.size
    gram = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            gram[i, j] = sum(op[k, i].conjugate() * op[k, j] for k in range(d))
    total = 0.0 + 0.0j
    for i in range(d):
        for j in range(d):
            total += psi_vec[i].conjugate() * gram[i, j] * psi_vec[j]
    return float(total.real)


PLUS = PureState((2,), np.array([1.0, 1.0]) / np.sqrt(2))
ZERO = PureState((2,), np.array([1.0, 0.0]))


class TestOutcomeProbabilities:
    def test_projective_on_basis_state(self):
        np.testing.assert_allclose(outcome_probabilities(ZERO, z_projectors(2)), [1.0, 0.0], atol=1e-14)

    def test_plus_state_half_half(self):
        np.testing.assert_allclose(outcome_probabilities(PLUS, z_projectors(2)), [0.5, 0.5], atol=1e-12)

    def test_noisy_pair_vs_expectation_oracle(self):
        pair = noisy_pair(0.9)
        probs = outcome_probabilities(ZERO, pair)
        expected = [expectation_oracle(ZERO.vector, op) for op in pair.matrices]
        np.testing.assert_allclose(probs, expected, atol=1e-12)
        np.testing.assert_allclose(probs, [0.9, 0.1], atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError, match="dimension-match"):
            outcome_probabilities(bell_phi_plus(), z_projectors(2))

    def test_incomplete_set_rejected(self):
        p0 = np.diag([1.0, 0.0]).astype(complex)
        lonely = MeasurementSet(2, (("0", p0),))
        with pytest.raises(ValidationError, match="completeness"):
            outcome_probabilities(ZERO, lonely)


class TestMapToMeasurementSpace:
    def test_plus_with_projectors(self):
        image = map_to_measurement_space(PLUS, z_projectors(2))
        np.testing.assert_allclose(image.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-12)
        assert image.outcome_labels == ("0", "1")
        assert image.structure is None

    def test_trivial_set_single_outcome(self):
        trivial = MeasurementSet(2, (("all", np.eye(2, dtype=complex)),))
        image = map_to_measurement_space(PLUS, trivial)
        np.testing.assert_allclose(image.amplitudes, [1.0], atol=1e-14)

    def test_bell_with_local_noisy_pairs(self):
        local = LocalMeasurementSet(noisy_pair(0.9), noisy_pair(0.9))
        image = map_to_measurement_space(bell_phi_plus(), local)
        assert image.structure == (2, 2)
        assert image.outcome_labels == ("(0,0)", "(0,1)", "(1,0)", "(1,1)")
        expected = [
            expectation_oracle(bell_phi_plus().vector, np.kron(ma, mb))
            for ma in noisy_pair(0.9).matrices
            for mb in noisy_pair(0.9).matrices
        ]
        np.testing.assert_allclose(image.amplitudes, np.sqrt(expected), atol=1e-12)
        np.testing.assert_allclose(
            image.amplitudes, np.sqrt([0.41, 0.09, 0.09, 0.41]), atol=1e-12
        )

    def test_zero_probability_outcomes_kept(self):
        image = map_to_measurement_space(ZERO, z_projectors(2))
        assert image.amplitudes.size == 2
        assert image.amplitudes[1] == 0.0

    def test_global_phase_insensitive(self):
        base = map_to_measurement_space(PLUS, z_projectors(2)).amplitudes
        rotated = PureState((2,), 1j * PLUS.vector)
        assert np.array_equal(map_to_measurement_space(rotated, z_projectors(2)).amplitudes, base)
        generic = PureState((2,), np.exp(0.7j) * PLUS.vector)
        np.testing.assert_allclose(
            map_to_measurement_space(generic, z_projectors(2)).amplitudes, base, atol=1e-12
        )

    def test_rank1_projective_gives_component_magnitudes(self):
        rng = np.random.default_rng(31)
        u = haar_unitary(3, rng)
        ops = tuple((str(i), np.outer(u[:, i], u[:, i].conj())) for i in range(3))
        basis_set = MeasurementSet(3, ops)
        psi = haar_state((3,), rng)
        image = map_to_measurement_space(psi, basis_set)
        expected = [abs(np.vdot(u[:, i], psi.vector)) for i in range(3)]
        np.testing.assert_allclose(image.amplitudes, expected, atol=1e-12)

    def test_nonlinearity_witness(self):
        # the map never produces negative coordinates, so it cannot be linear
        zero_img = map_to_measurement_space(ZERO, z_projectors(2)).amplitudes
        one_img = map_to_measurement_space(
            PureState((2,), np.array([0.0, 1.0])), z_projectors(2)
        ).amplitudes
        minus = PureState((2,), np.array([1.0, -1.0]) / np.sqrt(2))
        minus_img = map_to_measurement_space(minus, z_projectors(2)).amplitudes
        linear_combination = (zero_img - one_img) / np.sqrt(2)
        assert not np.allclose(minus_img, linear_combination, atol=1e-6)

    def test_normalization_over_random_pairs(self):
        rng = np.random.default_rng(77)
        for _ in range(200):
            dim = int(rng.integers(2, 9))
            outcomes = int(rng.integers(1, 9))
            mset = random_measurement_set(dim, outcomes, rng)
            psi = haar_state((dim,), rng)
            image = map_to_measurement_space(psi, mset)
            assert abs(np.sum(image.amplitudes**2) - 1.0) <= 1e-10


class TestValidateCompleteness:
    def test_projectors_pass(self):
        report = validate_completeness(z_projectors(2))
        assert report.passed and report.deviation < 1e-15

    def test_noisy_pair_passes(self):
        report = validate_completeness(noisy_pair(0.9))
        assert report.passed and report.deviation < 1e-12

    def test_missing_outcome_fails(self):
        p0 = np.diag([1.0, 0.0]).astype(complex)
        report = validate_completeness(MeasurementSet(2, (("0", p0),)))
        assert not report.passed
        assert abs(report.deviation - 1.0) < 1e-15


class TestSetConstruction:
    def test_duplicate_labels_rejected(self):
        eye = np.eye(2, dtype=complex) / np.sqrt(2)
        with pytest.raises(ValidationError, match="labels"):
            MeasurementSet(2, (("a", eye), ("a", eye)))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="shape"):
            MeasurementSet(2, (("a", np.eye(3, dtype=complex)),))

    def test_random_set_is_complete(self):
        for seed in range(5):
            mset = random_measurement_set(3, 4, seed)
            assert mset.completeness_deviation() < 1e-13

    def test_random_local_set(self):
        local = random_local_set(2, 3, 2, 4, 9)
        assert local.structure == (2, 4)
        assert local.alice.dim == 2 and local.bob.dim == 3
        joint = local.joint()
        assert joint.dim == 6 and len(joint) == 8
        assert joint.completeness_deviation() < 1e-12

    def test_mspace_state_validation(self):
        with pytest.raises(ValidationError, match="nonnegative"):
            MeasurementSpaceState(("a", "b"), np.array([1.2, -0.1]))
        with pytest.raises(ValidationError, match="normalization"):
            MeasurementSpaceState(("a", "b"), np.array([1.0, 1.0]))
        with pytest.raises(ValidationError, match="structure"):
            MeasurementSpaceState(("a", "b"), np.array([1.0, 0.0]), structure=(2, 2))

    def test_as_pure_state_requires_factorization(self):
        flat = MeasurementSpaceState(("a", "b", "c", "d"), np.full(4, 0.5))
        with pytest.raises(ValidationError, match="factorization"):
            flat.as_pure_state()
        assert flat.as_pure_state((2, 2)).dims == (2, 2)
        with pytest.raises(ValidationError, match="factorization"):
            flat.as_pure_state((3, 2))
