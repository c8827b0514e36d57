import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lelab.basis import build_basis, build_basis_1d
from lelab.dynamics import build_hamiltonian, evolve
from lelab.reduction import (
    alpha_decompose,
    assemble_block_diagonal,
    effective_entropy,
    entropy_trace,
    expectation_xi_independent,
    first_order_reduced_step,
    free_phase_law,
    is_effectively_pure,
    reduce,
    shell_entropies,
    weighted_effective_entropy,
)
from lelab.states import (
    DensityMatrix,
    PureState,
    pure_to_density,
    random_density_matrix,
    random_effectively_pure_state,
    random_pure_state,
)

BASIS = build_basis(1, 1.0)


@given(seed=st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_alpha_decomposition_reconstructs_exactly(seed):
    rho = random_density_matrix(BASIS.size, np.random.default_rng(seed))
    dec = alpha_decompose(rho.matrix, BASIS)
    # components tile the matrix with disjoint supports: equality is exact
    np.testing.assert_array_equal(dec.reconstruct(), rho.matrix)


def test_alpha_labels_are_energy_differences():
    dec = alpha_decompose(np.eye(BASIS.size), BASIS)
    # diagonal matrix lives purely in the alpha = 0 sector
    assert dec.alphas.tolist() == [0.0]
    i = BASIS.index_of((0, 0, 0))
    j = BASIS.index_of((1, 0, 0))
    m = np.zeros((BASIS.size, BASIS.size))
    m[i, j] = 1.0  # |E=0><E=1|: column energy minus row energy = +1
    dec = alpha_decompose(m, BASIS)
    assert dec.alphas.tolist() == [1.0]


def test_alpha_sector_count_for_generic_matrix():
    # shell energies {0,1,2,3}: pairwise differences give 7 sectors
    rho = random_density_matrix(BASIS.size, np.random.default_rng(5))
    dec = alpha_decompose(rho.matrix, BASIS)
    assert dec.alphas.tolist() == [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]


def test_alpha_zero_component_is_shell_block_diagonal():
    rho = random_density_matrix(BASIS.size, np.random.default_rng(2))
    dec = alpha_decompose(rho.matrix, BASIS)
    block_diag = assemble_block_diagonal(reduce(rho, BASIS), BASIS)
    np.testing.assert_array_equal(dec.component(0.0), block_diag)


@given(seed=st.integers(0, 10_000), t=st.floats(-10.0, 10.0))
@settings(max_examples=30, deadline=None)
def test_free_phase_law_matches_exact_evolution(seed, t):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(BASIS.size, rng)
    h0 = build_hamiltonian(BASIS, 0.0, 1.0)
    via_phases = free_phase_law(alpha_decompose(rho.matrix, BASIS), t)
    via_evolution = evolve(rho, h0, t).matrix
    assert np.abs(via_phases - via_evolution).max() <= 1e-10


def test_reduce_weights_are_shell_traces():
    rho = random_density_matrix(BASIS.size, np.random.default_rng(11))
    dec = reduce(rho, BASIS)
    assert dec.weights.sum() == pytest.approx(1.0, abs=1e-12)
    for s, members in enumerate(BASIS.shells.members):
        block = rho.matrix[np.ix_(members, members)]
        assert dec.weights[s] == pytest.approx(np.trace(block).real, abs=1e-14)
        normalized = dec.rho_hat(s)
        np.testing.assert_allclose(normalized * dec.weights[s], block, atol=1e-14)


def test_reduce_is_idempotent():
    rho = random_density_matrix(BASIS.size, np.random.default_rng(13))
    once = reduce(rho, BASIS)
    again = reduce(assemble_block_diagonal(once, BASIS), BASIS)
    np.testing.assert_array_equal(once.weights, again.weights)
    for b1, b2 in zip(once.blocks, again.blocks):
        np.testing.assert_array_equal(b1, b2)


def test_effective_entropy_of_shell_mixture():
    # maximally mixed on the 6-fold shell: S_eff = ln 6 regardless of weight
    members = BASIS.shells.members[1]
    m = np.zeros((BASIS.size, BASIS.size), dtype=complex)
    m[members, members] = 1.0 / len(members)
    dec = reduce(DensityMatrix(m), BASIS)
    assert effective_entropy(dec) == pytest.approx(np.log(6), abs=1e-12)
    assert weighted_effective_entropy(dec) == pytest.approx(np.log(6), abs=1e-12)
    assert not is_effectively_pure(dec)


def test_shell_entropies_are_per_shell():
    rho = random_effectively_pure_state(BASIS, np.random.default_rng(8))
    per_shell = shell_entropies(reduce(rho, BASIS))
    assert per_shell.shape == (BASIS.n_shells,)
    np.testing.assert_allclose(per_shell, 0.0, atol=1e-12)


def test_pure_states_are_effectively_pure():
    rng = np.random.default_rng(21)
    for _ in range(1000):
        rho = pure_to_density(random_pure_state(BASIS.size, rng))
        assert is_effectively_pure(reduce(rho, BASIS))


def test_globally_mixed_shell_blocks_detected():
    rho = random_density_matrix(BASIS.size, np.random.default_rng(22))
    assert not is_effectively_pure(reduce(rho, BASIS))


def test_empty_shells_do_not_contribute():
    # support the state on the |n|^2 = 0 shell only
    m = np.zeros((BASIS.size, BASIS.size), dtype=complex)
    i = BASIS.index_of((0, 0, 0))
    m[i, i] = 1.0
    dec = reduce(DensityMatrix(m), BASIS)
    np.testing.assert_array_equal(dec.occupied, [True, False, False, False])
    assert dec.rho_hat(2) is None
    assert effective_entropy(dec) == 0.0
    assert is_effectively_pure(dec)


def test_expectation_xi_independent_under_free_flow():
    # shell-wise observables see only the alpha = 0 part, which free
    # evolution multiplies by unit phases: expectations are stationary
    rng = np.random.default_rng(31)
    rho = random_density_matrix(BASIS.size, rng)
    h0 = build_hamiltonian(BASIS, 0.0, 1.0)
    ops = []
    for members in BASIS.shells.members:
        d = len(members)
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        ops.append((g + g.conj().T) / 2)
    before = expectation_xi_independent(ops, rho, BASIS)
    after = expectation_xi_independent(ops, evolve(rho, h0, 3.7), BASIS)
    assert after == pytest.approx(before, abs=1e-10)


def test_expectation_rejects_wrong_block_shapes():
    ops = [np.zeros((2, 2))] * BASIS.n_shells
    rho = random_density_matrix(BASIS.size, np.random.default_rng(1))
    with pytest.raises(ValueError):
        expectation_xi_independent(ops, rho, BASIS)


def test_first_order_step_error_is_second_order():
    h = build_hamiltonian(BASIS, 0.05, 1.0)
    rho0 = random_effectively_pure_state(BASIS, np.random.default_rng(5))
    errs = []
    ts = [0.02, 0.04]
    for t in ts:
        exact = assemble_block_diagonal(reduce(evolve(rho0, h, t), BASIS), BASIS)
        approx = assemble_block_diagonal(first_order_reduced_step(rho0, h, t, BASIS), BASIS)
        errs.append(np.linalg.norm(exact - approx))
    # doubling t quadruples the error
    assert errs[1] / errs[0] == pytest.approx(4.0, rel=0.05)


def test_first_order_step_is_exact_for_free_evolution():
    h0 = build_hamiltonian(BASIS, 0.0, 1.0)
    rho0 = random_density_matrix(BASIS.size, np.random.default_rng(17))
    exact = reduce(evolve(rho0, h0, 0.3), BASIS)
    approx = first_order_reduced_step(rho0, h0, 0.3, BASIS)
    for b1, b2 in zip(exact.blocks, approx.blocks):
        np.testing.assert_allclose(b1, b2, atol=1e-12)


def test_entropy_trace_rows_follow_grid():
    h = build_hamiltonian(BASIS, 0.2, 1.0)
    rho0 = random_effectively_pure_state(BASIS, np.random.default_rng(6))
    times = np.linspace(0.0, 2.0, 9)
    rows = entropy_trace(rho0, h, times, BASIS)
    assert [r.t for r in rows] == times.tolist()
    assert rows[0].effective_entropy <= 1e-12
    assert rows[0].effectively_pure


def test_entropy_trace_worker_count_does_not_change_values():
    h = build_hamiltonian(BASIS, 0.2, 1.0)
    rho0 = random_effectively_pure_state(BASIS, np.random.default_rng(6))
    times = np.linspace(0.0, 2.0, 7)
    serial = entropy_trace(rho0, h, times, BASIS, workers=None)
    threaded = entropy_trace(rho0, h, times, BASIS, workers=4)
    for a, b in zip(serial, threaded):
        assert a.effective_entropy == b.effective_entropy
        assert a.purity == b.purity
        np.testing.assert_array_equal(a.shell_entropies, b.shell_entropies)


def test_reduce_canonical_examples():
    # all population on the nondegenerate zero-momentum shell
    amp = np.zeros(BASIS.size, dtype=complex)
    amp[BASIS.index_of((0, 0, 0))] = 1.0
    dec = reduce(pure_to_density(PureState(amp)), BASIS)
    assert dec.weights[0] == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(dec.rho_hat(0), [[1.0]], atol=1e-14)
    assert not dec.occupied[1:].any()

    # equal superposition across two shells: half weight each, rank-1 blocks,
    # and the cross-shell coherence is dropped by the reduction
    amp = np.zeros(BASIS.size, dtype=complex)
    amp[[BASIS.index_of((0, 0, 0)), BASIS.index_of((1, 0, 0))]] = 1.0 / np.sqrt(2)
    dec = reduce(pure_to_density(PureState(amp)), BASIS)
    np.testing.assert_allclose(dec.weights[:2], [0.5, 0.5], atol=1e-14)
    for s in (0, 1):
        eigs = np.linalg.eigvalsh(dec.rho_hat(s))
        assert eigs[-1] == pytest.approx(1.0, abs=1e-12)
    assert is_effectively_pure(dec)

    # maximally mixed on the 6-fold shell: full weight, block I/6
    members = BASIS.shells.members[1]
    m = np.zeros((BASIS.size, BASIS.size), dtype=complex)
    m[members, members] = 1.0 / 6.0
    dec = reduce(DensityMatrix(m), BASIS)
    assert dec.weights[1] == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(dec.rho_hat(1), np.eye(6) / 6.0, atol=1e-14)


def test_two_shell_mixture_entropies_add_unweighted():
    # two shells holding maximally mixed sub-blocks of ranks 2 and 3:
    # the per-shell entropies ln 2 and ln 3 add without lambda weights
    sub2 = BASIS.shells.members[1][:2]
    sub3 = BASIS.shells.members[2][:3]
    m = np.zeros((BASIS.size, BASIS.size), dtype=complex)
    m[sub2, sub2] = 0.5 / 2.0
    m[sub3, sub3] = 0.5 / 3.0
    dec = reduce(DensityMatrix(m), BASIS)
    assert effective_entropy(dec) == pytest.approx(np.log(2) + np.log(3), abs=1e-12)
    assert weighted_effective_entropy(dec) == pytest.approx(
        0.5 * np.log(2) + 0.5 * np.log(3), abs=1e-12
    )


def test_nondegenerate_shells_make_every_state_effectively_pure():
    line = build_basis_1d(6, 1.0)
    rng = np.random.default_rng(3)
    for _ in range(25):
        rho = random_density_matrix(line.size, rng)
        assert is_effectively_pure(reduce(rho, line))


def test_expectation_identity_and_free_energy():
    rng = np.random.default_rng(11)
    rho = random_density_matrix(BASIS.size, rng)
    dec = reduce(rho, BASIS)

    identity_blocks = [np.eye(len(m)) for m in BASIS.shells.members]
    assert expectation_xi_independent(identity_blocks, rho, BASIS) == pytest.approx(
        1.0, abs=1e-12
    )

    h0_blocks = [
        e * np.eye(len(m)) for e, m in zip(BASIS.shells.energies, BASIS.shells.members)
    ]
    free_energy = float((dec.weights * BASIS.shells.energies).sum())
    assert expectation_xi_independent(h0_blocks, rho, BASIS) == pytest.approx(
        free_energy, abs=1e-12
    )

    # random shell-block-diagonal observable against the full-trace oracle
    full = np.zeros((BASIS.size, BASIS.size), dtype=complex)
    blocks = []
    for members in BASIS.shells.members:
        g = rng.standard_normal((len(members), len(members)))
        g = g + 1j * rng.standard_normal(g.shape)
        block = (g + g.conj().T) / 2
        blocks.append(block)
        full[np.ix_(members, members)] = block
    value = expectation_xi_independent(blocks, rho, BASIS)
    assert value == pytest.approx(float(np.trace(full @ rho.matrix).real), abs=1e-10)


def test_free_evolution_leaves_reduction_blocks_fixed():
    h0 = build_hamiltonian(BASIS, 0.0, 1.0)
    rho = random_density_matrix(BASIS.size, np.random.default_rng(7))
    before = reduce(rho, BASIS)
    for t in (0.3, 1.7, 4.0):
        after = reduce(evolve(rho, h0, t), BASIS)
        np.testing.assert_allclose(after.weights, before.weights, atol=1e-10)
        for ba, bb in zip(after.blocks, before.blocks):
            np.testing.assert_allclose(ba, bb, atol=1e-10)


def test_pure_initial_state_keeps_global_entropy_zero():
    h = build_hamiltonian(BASIS, 0.3, 1.0)
    rho0 = pure_to_density(random_pure_state(BASIS.size, np.random.default_rng(5)))
    for row in entropy_trace(rho0, h, np.linspace(0.0, 2.0, 5), BASIS):
        assert abs(row.global_entropy) <= 1e-8
        assert row.purity == pytest.approx(1.0, abs=1e-10)
