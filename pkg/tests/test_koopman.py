import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lelab.errors import StateValidationError
from lelab.koopman import (
    BetaMarginal,
    PhaseSpaceDensity,
    PhaseSpaceGrid,
    apply_kick,
    classical_effective_entropy,
    classical_free_flow,
    classical_reduce,
    density_from_values,
    gaussian_density,
    single_p_row_density,
    xi_beta_coordinates,
)

GRID = PhaseSpaceGrid(nq=64, n_p=64, dq=2 * np.pi / 64, dp=0.1)


def test_grid_excludes_zero_momentum():
    assert 0.0 not in GRID.p
    assert np.abs(GRID.p).min() == pytest.approx(GRID.dp / 2)
    assert GRID.p.min() == -GRID.p.max()
    assert GRID.q[0] == 0.0
    assert GRID.q_period == pytest.approx(2 * np.pi)


def test_grid_validation():
    with pytest.raises(ValueError):
        PhaseSpaceGrid(nq=8, n_p=7, dq=0.1, dp=0.1)  # odd p count
    with pytest.raises(ValueError):
        PhaseSpaceGrid(nq=8, n_p=8, dq=-0.1, dp=0.1)


def test_density_validation():
    ok = np.full((GRID.nq, GRID.n_p), 1.0 / (GRID.nq * GRID.n_p * GRID.dq * GRID.dp))
    assert PhaseSpaceDensity(GRID, ok).mass == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(StateValidationError):
        PhaseSpaceDensity(GRID, -ok)
    with pytest.raises(StateValidationError):
        PhaseSpaceDensity(GRID, 2.0 * ok)
    with pytest.raises(StateValidationError):
        PhaseSpaceDensity(GRID, ok[:, :4])


def test_xi_translation_identity():
    # free flow moves q by 2pt, xi = q/(2p) by exactly t: pure algebra
    rng = np.random.default_rng(0)
    q = rng.uniform(0, 2 * np.pi, 200)
    p = rng.uniform(0.05, 3.0, 200) * rng.choice([-1.0, 1.0], 200)
    t = 1.7
    xi0, beta0 = xi_beta_coordinates(q, p)
    xi1, beta1 = xi_beta_coordinates(q + 2 * p * t, p)
    assert np.abs(xi1 - (xi0 + t)).max() <= 1e-12
    np.testing.assert_array_equal(beta1, beta0)


def test_xi_chart_rejects_singular_band():
    with pytest.raises(ValueError):
        xi_beta_coordinates(1.0, 0.0)
    with pytest.raises(ValueError):
        xi_beta_coordinates(np.array([1.0]), np.array([0.01]), p_min=0.05)
    xi, beta = xi_beta_coordinates(1.0, 0.5, p_min=0.05)
    assert xi == pytest.approx(1.0)
    assert beta == 0.5


@given(t=st.floats(-20.0, 20.0), seed=st.integers(0, 1000))
@settings(max_examples=25, deadline=None)
def test_free_flow_conserves_mass_and_marginal(t, seed):
    rng = np.random.default_rng(seed)
    rho = density_from_values(GRID, rng.uniform(0.0, 1.0, (GRID.nq, GRID.n_p)))
    flowed = classical_free_flow(rho, t)
    assert abs(flowed.mass - 1.0) <= 1e-6
    g0 = classical_reduce(rho)
    g1 = classical_reduce(flowed)
    assert np.abs(g1.density - g0.density).max() <= 1e-6
    assert abs(
        classical_effective_entropy(g1) - classical_effective_entropy(g0)
    ) <= 1e-6


def test_free_flow_transports_along_q():
    # one full period at p row j: 2 p t = L when t = L / (2p); density returns
    rho = gaussian_density(GRID, q0=np.pi, p0=1.05, sigma_q=0.4, sigma_p=0.05)
    j = int(np.argmax(classical_reduce(rho).density))
    p = GRID.p[j]
    period = GRID.q_period / (2 * abs(p))
    back = classical_free_flow(rho, period)
    np.testing.assert_allclose(back.values[:, j], rho.values[:, j], atol=1e-12)


def test_single_cell_marginal_entropy_is_log_dp():
    rho = single_p_row_density(GRID, p0=1.0)
    s = classical_effective_entropy(classical_reduce(rho))
    assert s == pytest.approx(np.log(GRID.dp), abs=1e-12)


def test_gaussian_marginal_entropy_matches_closed_form():
    sigma = 0.5
    grid = PhaseSpaceGrid(nq=32, n_p=256, dq=2 * np.pi / 32, dp=0.05)
    rho = gaussian_density(grid, q0=np.pi, p0=0.0, sigma_q=1.0, sigma_p=sigma)
    s = classical_effective_entropy(classical_reduce(rho))
    exact = 0.5 * np.log(2 * np.pi * np.e * sigma**2)
    assert s == pytest.approx(exact, abs=1e-3)


def test_kick_with_zero_strength_is_identity():
    rho = gaussian_density(GRID, q0=2.0, p0=0.8, sigma_q=0.5, sigma_p=0.3)
    kicked = apply_kick(rho, lambda q: -np.sin(q), 0.0)
    np.testing.assert_array_equal(kicked.values, rho.values)


def test_constant_gradient_kick_shifts_marginal_rigidly():
    rho = gaussian_density(GRID, q0=2.0, p0=0.8, sigma_q=0.5, sigma_p=0.3)
    s0 = classical_effective_entropy(classical_reduce(rho))
    # strength * V' = 3 dp: an exact three-cell shift, entropy invariant
    kicked = apply_kick(rho, lambda q: np.ones_like(q), 3.0 * GRID.dp)
    s1 = classical_effective_entropy(classical_reduce(kicked))
    g0 = classical_reduce(rho).density
    g1 = classical_reduce(kicked).density
    np.testing.assert_allclose(g1[:-3], g0[3:], atol=1e-12)
    assert s1 == pytest.approx(s0, abs=1e-12)


def test_kick_spreads_single_row_and_raises_entropy():
    rho = single_p_row_density(GRID, p0=1.0)
    flowed = classical_free_flow(rho, 1.0)
    kicked = apply_kick(flowed, lambda q: -np.sin(q), 0.3)
    marginal = classical_reduce(kicked)
    assert int((marginal.density > 0).sum()) > 1
    s = classical_effective_entropy(marginal)
    assert s >= np.log(GRID.dp) + 1e-3
    assert abs(kicked.mass - 1.0) <= 1e-6


def test_kick_off_grid_mass_loss_is_caught():
    rho = single_p_row_density(GRID, p0=3.0)  # near the p boundary
    with pytest.raises(StateValidationError):
        # p -> p + 1 overshoots the top of the grid and the mass defect trips
        apply_kick(rho, lambda q: -np.ones_like(q), 1.0)


def test_marginal_mass_validated():
    with pytest.raises(StateValidationError):
        BetaMarginal(p=GRID.p, density=np.ones(GRID.n_p), dp=GRID.dp)


def test_xi_beta_chart_point_values():
    assert xi_beta_coordinates(0.0, 1.0) == (0.0, 1.0)
    xi, beta = xi_beta_coordinates(2.0, 1.0)
    assert (xi, beta) == (1.0, 1.0)
    # after flowing for t = 3 the same trajectory sits at q = 2 + 2*1*3 = 8
    assert xi_beta_coordinates(8.0, 1.0) == (4.0, 1.0)
    assert xi_beta_coordinates(1.0, -0.5) == (-1.0, -0.5)


def test_free_flow_at_time_zero_is_identity():
    rho = gaussian_density(GRID, q0=np.pi, p0=1.1, sigma_q=0.7, sigma_p=0.5)
    np.testing.assert_array_equal(classical_free_flow(rho, 0.0).values, rho.values)


def test_product_density_reduces_to_momentum_factor():
    fq = 1.0 + 0.3 * np.cos(GRID.q)
    gp = np.exp(-((GRID.p - 0.8) ** 2))
    rho = density_from_values(GRID, np.outer(fq, gp))
    marginal = classical_reduce(rho)
    np.testing.assert_allclose(
        marginal.density, gp / (gp.sum() * GRID.dp), atol=1e-12
    )


def test_fixed_row_spreads_reduce_identically():
    # any q profile on one p row reduces to the same delta-like marginal
    flat = single_p_row_density(GRID, p0=1.0)
    bumpy = single_p_row_density(GRID, p0=1.0, q_profile=1.0 + 0.9 * np.sin(GRID.q))
    np.testing.assert_allclose(
        classical_reduce(flat).density, classical_reduce(bumpy).density, atol=1e-14
    )
    j = int(np.argmax(classical_reduce(flat).density))
    assert classical_reduce(flat).density[j] == pytest.approx(1.0 / GRID.dp, abs=1e-12)


def test_uniform_marginal_entropy_is_log_width():
    cells = 16
    vals = np.zeros((GRID.nq, GRID.n_p))
    vals[:, 10 : 10 + cells] = 1.0
    rho = density_from_values(GRID, vals)
    s = classical_effective_entropy(classical_reduce(rho))
    assert s == pytest.approx(np.log(cells * GRID.dp), abs=1e-12)
