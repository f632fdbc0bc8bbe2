import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qdce import dynamics
from qdce.hilbert import (
    A1,
    A2,
    CAVITY,
    DimensionError,
    Operator,
    StateVector,
    TwoQubitDensity,
    basis_state,
    embed,
    fidelity_up_to_global_phase,
    fock,
    identity,
    pad_fock,
    partial_trace,
    qubit,
    register_dims,
    sigma_x,
    tensor,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def _normalized(ri):
    v = ri[0] + 1j * ri[1]
    norm = np.linalg.norm(v)
    return v / norm if norm > 1e-6 else np.eye(len(v))[0].astype(complex)


def complex_vectors(n):
    return st.tuples(arrays(float, n, elements=finite), arrays(float, n, elements=finite)).map(
        _normalized)


def random_state(rng, dims):
    v = rng.normal(size=int(np.prod(dims))) + 1j * rng.normal(size=int(np.prod(dims)))
    return StateVector(v / np.linalg.norm(v), dims)


def brute_embed(op, targets, dims):
    """Element-by-element lift of op: <i|U|j> = <i_T|op|j_T> * delta(i_rest, j_rest)."""
    size = int(np.prod(dims))
    out = np.zeros((size, size), dtype=complex)
    op_dims = [dims[t] for t in targets]
    for i, ii in enumerate(np.ndindex(*dims)):
        for j, jj in enumerate(np.ndindex(*dims)):
            if any(ii[k] != jj[k] for k in range(len(dims)) if k not in targets):
                continue
            a = np.ravel_multi_index([ii[t] for t in targets], op_dims)
            b = np.ravel_multi_index([jj[t] for t in targets], op_dims)
            out[i, j] = op.matrix[a, b]
    return out


def test_ground_times_vacuum_is_index_zero():
    psi = tensor([qubit("g"), fock(0, 2)])
    assert psi.dims == (2, 3)
    assert psi.amplitudes[0] == 1 and np.count_nonzero(psi.amplitudes) == 1


def test_tensor_linearity_example():
    plus_i = StateVector(np.array([1, 1j]) / np.sqrt(2), (2,))
    psi = tensor([plus_i, fock(0, 1)])
    np.testing.assert_allclose(psi.amplitudes, [1 / np.sqrt(2), 0, 1j / np.sqrt(2), 0], atol=1e-15)


def test_four_ground_states_is_register_origin():
    psi = tensor([qubit("g"), qubit("g"), qubit("g"), fock(0, 2)])
    assert psi.dims == register_dims(2)
    assert psi.amplitudes[0] == 1 and psi.norm() == 1


def test_tensor_rejects_mixed_kinds():
    with pytest.raises(TypeError):
        tensor([qubit("g"), sigma_x()])


@settings(max_examples=50)
@given(complex_vectors(2), complex_vectors(3), complex_vectors(2))
def test_kronecker_associativity(a, b, c):
    a, b, c = StateVector(a, (2,)), StateVector(b, (3,)), StateVector(c, (2,))
    left = tensor([a, tensor([b, c])])
    right = tensor([tensor([a, b]), c])
    assert left.dims == right.dims == (2, 3, 2)
    np.testing.assert_allclose(left.amplitudes, right.amplitudes, atol=1e-14, rtol=0)


def test_embed_identity_is_global_identity():
    dims = register_dims(2)
    for t in range(4):
        lifted = embed(identity((dims[t],)), (t,), dims)
        np.testing.assert_array_equal(lifted.matrix, np.eye(24))


def test_embed_flip_on_a2():
    dims = register_dims(2)
    out = embed(sigma_x(), (A2,), dims) @ basis_state((0, 0, 0, 0), dims)
    assert fidelity_up_to_global_phase(out, basis_state((0, 1, 0, 0), dims)) == 1


@pytest.mark.parametrize("targets", [(A1, CAVITY), (CAVITY, A1), (2, 3), (1, 3)])
def test_embed_matches_brute_force(targets):
    dims = register_dims(2)
    rng = np.random.default_rng(7)
    d = int(np.prod([dims[t] for t in targets]))
    op = Operator(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)), [dims[t] for t in targets])
    np.testing.assert_allclose(embed(op, targets, dims).matrix, brute_embed(op, targets, dims),
                               atol=1e-15)


def test_embedded_resonant_swap_reproduces_table():
    # |g,0> -> |g,0>, |e,0> -> -i|g,1>, |g,1> -> -i|e,0> with A2, A3 spectators
    dims = register_dims(2)
    u = embed(dynamics.u_on(np.pi / 2, 2), (A1, CAVITY), dims)
    for a2, a3 in [(0, 0), (1, 0), (0, 1), (1, 1)]:
        cases = [((0, 0), (0, 0), 1), ((1, 0), (0, 1), -1j), ((0, 1), (1, 0), -1j)]
        for (a1, n), (b1, m), amp in cases:
            out = u @ basis_state((a1, a2, a3, n), dims)
            expected = amp * basis_state((b1, a2, a3, m), dims).amplitudes
            np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)


def test_embed_errors():
    dims = register_dims(2)
    with pytest.raises(DimensionError):
        embed(sigma_x(), (CAVITY,), dims)
    with pytest.raises(DimensionError):
        embed(dynamics.u_on(1.0, 2), (A1, A1), dims)
    with pytest.raises(DimensionError):
        embed(sigma_x(), (7,), dims)


def test_state_length_must_match_dims():
    with pytest.raises(DimensionError):
        StateVector(np.ones(5), (2, 3))


def test_values_are_immutable():
    psi = qubit("g")
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 2


def test_product_state_partial_trace_is_pure_projector():
    rng = np.random.default_rng(1)
    parts = [random_state(rng, (2,)), random_state(rng, (2,)), random_state(rng, (2,)),
             random_state(rng, (3,))]
    psi = tensor(parts)
    for keep in ([0], [1, 2], [3], [2, 3]):
        rho = partial_trace(psi, keep)
        kept = tensor([parts[k] for k in keep])
        np.testing.assert_allclose(rho, kept.projector(), atol=1e-12)
        assert abs(np.trace(rho @ rho) - 1) < 1e-12


def test_bell_like_reduced_state_is_maximally_mixed():
    # cos(pi/4)|p>|g> + sin(pi/4)|w>|e> with <p|w> = 0
    p = np.array([1, 1j]) / np.sqrt(2)
    w = np.array([1, -1j]) / np.sqrt(2)
    psi = StateVector((np.kron(p, [1, 0]) + np.kron(w, [0, 1])) / np.sqrt(2), (2, 2))
    rho = partial_trace(psi, [0])
    np.testing.assert_allclose(np.linalg.eigvalsh(rho), [0.5, 0.5], atol=1e-12)


def test_partial_trace_rejects_bad_selection():
    psi = tensor([qubit("g"), qubit("e")])
    with pytest.raises(DimensionError):
        partial_trace(psi, [])
    with pytest.raises(DimensionError):
        partial_trace(psi, [2])


def test_fidelity_examples():
    rng = np.random.default_rng(3)
    psi = random_state(rng, (2, 3))
    assert fidelity_up_to_global_phase(psi, psi) == pytest.approx(1, abs=1e-15)
    assert fidelity_up_to_global_phase(psi, psi.scaled(np.exp(1j * np.pi / 4))) == pytest.approx(1)
    plus = StateVector(np.array([1, 1]) / np.sqrt(2), (2,))
    assert fidelity_up_to_global_phase(qubit("g"), plus) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DimensionError):
        fidelity_up_to_global_phase(qubit("g"), fock(0, 2))


@given(st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi), st.integers(0, 2 ** 32 - 1))
def test_fidelity_phase_invariance(phase_a, phase_b, seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng, (2, 2)), random_state(rng, (2, 2))
    base = fidelity_up_to_global_phase(a, b)
    shifted = fidelity_up_to_global_phase(a.scaled(np.exp(1j * phase_a)), b.scaled(np.exp(1j * phase_b)))
    assert shifted == pytest.approx(base, abs=1e-14)
    assert fidelity_up_to_global_phase(b, a) == pytest.approx(base, abs=1e-15)


def test_dynamics_unitaries_preserve_norm():
    rng = np.random.default_rng(11)
    dims = register_dims(2)
    gates = [
        embed(dynamics.u_on(rng.uniform(0, 2 * np.pi), 2), (A1, CAVITY), dims),
        embed(dynamics.u_off(rng.uniform(-np.pi, np.pi), 2), (2, CAVITY), dims),
        embed(dynamics.ramsey(rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)), (A2,), dims),
    ]
    for _ in range(100):
        psi = random_state(rng, dims)
        for u in gates:
            assert abs((u @ psi).norm() - 1) < 1e-12


def test_two_qubit_density_validation():
    TwoQubitDensity(np.eye(4) / 4)
    with pytest.raises(ValueError):
        TwoQubitDensity(np.eye(4) / 2)
    with pytest.raises(ValueError):
        TwoQubitDensity(np.diag([1.5, -0.5, 0, 0]))
    with pytest.raises(ValueError):
        TwoQubitDensity(np.array([[0.5, 1j, 0, 0], [1j, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))


def test_pad_fock_keeps_amplitudes():
    rng = np.random.default_rng(5)
    small = random_state(rng, register_dims(1))
    big = pad_fock(small, 3)
    assert big.dims == register_dims(3)
    assert big.norm() == pytest.approx(1)
    np.testing.assert_array_equal(big.amplitudes.reshape(2, 2, 2, 4)[..., :2],
                                  small.amplitudes.reshape(2, 2, 2, 2))
