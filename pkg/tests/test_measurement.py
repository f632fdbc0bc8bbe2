import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdce.hilbert import StateVector, TwoQubitDensity
from qdce.ideal import IdealParams, ideal_final_state, ideal_joint_distribution
from qdce.measurement import (
    PARTICLE,
    WAVE,
    NoiseParams,
    UndefinedConditionalError,
    concurrence,
    joint_distribution,
    postselect,
    pure_state_concurrence,
    visibility,
    white_noise_mix,
)
from qdce.protocol import ProtocolParams, final_two_atom_state

BELL = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2), (2, 2))


def random_pure(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return StateVector(v / np.linalg.norm(v), (2, 2))


def test_particle_branch_product_distribution():
    p = np.array([1, 1j]) / np.sqrt(2)
    psi = StateVector(np.kron(p, [1, 0]), (2, 2))
    np.testing.assert_allclose(joint_distribution(psi).as_array(), [0.5, 0, 0.5, 0], atol=1e-15)


def test_distribution_of_ideal_state():
    params = IdealParams(0.4, 2.2)
    np.testing.assert_allclose(joint_distribution(ideal_final_state(params)).as_array(),
                               ideal_joint_distribution(params).as_array(), atol=1e-12)


def test_empty_branch_has_no_conditional():
    psi = ideal_final_state(IdealParams(np.pi / 2, 0.3))
    with pytest.raises(UndefinedConditionalError):
        postselect(psi, PARTICLE)


def test_wave_branch_conditional_example():
    stats = postselect(ideal_final_state(IdealParams(np.pi / 4, np.pi / 3)), WAVE)
    assert stats.branch_probability == pytest.approx(0.5)
    np.testing.assert_allclose(stats.conditional, (0.75, 0.25), atol=1e-12)


def test_unknown_branch():
    with pytest.raises(ValueError):
        postselect(BELL, "both")


@given(st.floats(0.01, np.pi / 2), st.floats(-10, 10))
def test_total_probability_reassembles_joint(alpha, vartheta):
    psi = final_two_atom_state(ProtocolParams(alpha, vartheta))
    joint = joint_distribution(psi).as_array().reshape(2, 2)
    for branch, col in ((PARTICLE, 0), (WAVE, 1)):
        try:
            stats = postselect(psi, branch)
        except UndefinedConditionalError:
            assert joint[:, col].sum() < 1e-12
            continue
        np.testing.assert_allclose(stats.branch_probability * np.array(stats.conditional),
                                   joint[:, col], atol=1e-12)
        assert sum(stats.conditional) == pytest.approx(1, abs=1e-12)


def test_visibility_examples():
    phis = np.linspace(0, 2 * np.pi, 41)
    assert visibility(np.full(10, 0.5)) == 0
    assert visibility(np.cos(phis / 2) ** 2) == pytest.approx(1, abs=1e-12)
    alpha = np.pi / 3
    curve = [ideal_joint_distribution(IdealParams(alpha, p)).marginal_s()[0] for p in phis]
    assert visibility(curve) == pytest.approx(0.75, abs=1e-12)
    with pytest.raises(ValueError):
        visibility([0, 0, 0])
    with pytest.raises(ValueError):
        visibility([0.1, 0.2])


def test_concurrence_examples():
    product = StateVector(np.kron([1, 0], np.array([1, 1]) / np.sqrt(2)), (2, 2))
    assert concurrence(TwoQubitDensity.from_state(product)) == pytest.approx(0, abs=1e-12)
    assert concurrence(TwoQubitDensity.from_state(BELL)) == pytest.approx(1, abs=1e-12)
    assert concurrence(TwoQubitDensity(np.eye(4) / 4)) == 0


def test_concurrence_rejects_non_psd():
    with pytest.raises(ValueError):
        concurrence(np.diag([1.2, -0.2, 0, 0]))


def test_pure_state_formula_matches_wootters():
    rng = np.random.default_rng(99)
    for _ in range(100):
        psi = random_pure(rng)
        assert concurrence(TwoQubitDensity.from_state(psi)) == pytest.approx(
            pure_state_concurrence(psi), abs=1e-10)


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_werner_state_concurrence(p):
    # Werner state p|Bell><Bell| + (1-p) I/4 has C = max(0, (3p-1)/2)
    rho = TwoQubitDensity(p * BELL.projector() + (1 - p) * np.eye(4) / 4)
    assert concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


def test_white_noise_examples():
    rho = TwoQubitDensity.from_state(ideal_final_state(IdealParams(np.pi / 2, 0.0)))
    np.testing.assert_array_equal(white_noise_mix(rho, 0.0).matrix, rho.matrix)
    np.testing.assert_allclose(white_noise_mix(rho, 1.0).matrix, np.eye(4) / 4)
    np.testing.assert_allclose(joint_distribution(white_noise_mix(rho, NoiseParams(0.5))).as_array(),
                               [1 / 8, 5 / 8, 1 / 8, 1 / 8], atol=1e-15)


def test_white_noise_range():
    with pytest.raises(ValueError):
        NoiseParams(1.5)
    with pytest.raises(ValueError):
        white_noise_mix(TwoQubitDensity(np.eye(4) / 4), -0.1)


@given(st.floats(0, 1), st.integers(0, 2 ** 32 - 1))
def test_white_noise_preserves_trace_and_hermiticity(eps, seed):
    rho = TwoQubitDensity.from_state(random_pure(np.random.default_rng(seed)))
    mixed = white_noise_mix(rho, eps).matrix
    assert abs(np.trace(mixed) - 1) <= 1e-15 * 4
    assert np.max(np.abs(mixed - mixed.conj().T)) <= 1e-15


def test_concurrence_non_increasing_under_noise():
    for alpha, vartheta in [(np.pi / 4, 0.5), (np.pi / 6, 2.0), (1.2, 4.0)]:
        rho = TwoQubitDensity.from_state(final_two_atom_state(ProtocolParams(alpha, vartheta)))
        values = [concurrence(white_noise_mix(rho, e)) for e in np.linspace(0, 1, 20)]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
