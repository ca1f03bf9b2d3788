import warnings

import numpy as np
import pytest

from oracles import expm_series, expm_series_scaled, simpson_running_sums
from qobsnet import (
    BadGridError,
    CouplingScheme,
    NonFiniteError,
    PlantSpec,
    SimulationResult,
    assemble_augmented,
    build_realization,
    check_convergence,
    check_hamiltonian_conservation,
    check_norm_bound,
    check_symplectic_ccr,
    coefficient_traces,
    matrix_exp,
    propagate,
    random_connected_graph,
    realization_unchecked,
    time_average_closed_form,
    time_average_quadrature,
)
from qobsnet.dynamics import (
    average_propagator,
    consensus_deviation,
    convergence_constant,
    propagate_matrix,
    running_average_closed_form,
    spectrum_real_part,
    uniform_grid,
)
from qobsnet.errors import GridTooCoarseWarning, SingularDriftError
from qobsnet.synthesis import J, AugmentedSystem

PLANT = PlantSpec()


def random_realizations(rng, count, n_max=8):
    out = []
    for _ in range(count):
        g = random_connected_graph(int(rng.integers(1, n_max + 1)), rng, (0.1, 2.0))
        real = build_realization(g, CouplingScheme.for_plant(PLANT, rng.normal(size=2)))
        out.append((real, assemble_augmented(PLANT, real)))
    return out


# --- matrix exponential -----------------------------------------------------------

def test_expm_zero():
    np.testing.assert_array_equal(matrix_exp(np.zeros((4, 4)), 3.0), np.eye(4))


@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 7.5])
def test_expm_rotation(t):
    expected = [[np.cos(2 * t), np.sin(2 * t)], [-np.sin(2 * t), np.cos(2 * t)]]
    np.testing.assert_allclose(matrix_exp(2 * J, t), expected, atol=1e-13)


def test_expm_against_power_series(rng):
    for _ in range(50):
        A = rng.normal(size=(6, 6))
        A *= 0.5 / np.linalg.norm(A, 2)
        ref = expm_series(A, 1.0, 30)
        got = matrix_exp(A, 1.0)
        assert np.linalg.norm(got - ref) <= 1e-10 * np.linalg.norm(ref)


def test_expm_against_scaled_series_large_norm(sec4_aug):
    for t in (0.1, 1.0, 10.0):
        ref = expm_series_scaled(sec4_aug.A_a, t)
        np.testing.assert_allclose(matrix_exp(sec4_aug.A_a, t), ref, atol=1e-11)


def test_expm_rejects_nonfinite():
    with pytest.raises(NonFiniteError):
        matrix_exp(np.array([[np.nan, 0], [0, 0]]))
    with pytest.raises(NonFiniteError):
        matrix_exp(np.eye(2), np.inf)


# --- propagation ----------------------------------------------------------------------

def test_propagate_zero_grid(sec4_aug):
    prop = propagate(sec4_aug, [0.0])
    np.testing.assert_array_equal(prop.phi[0], np.eye(11))


def test_plant_row_constant(sec4_aug):
    prop = propagate(sec4_aug, uniform_grid(10, 0.01))
    e1 = np.eye(11)[0]
    assert np.max(np.abs(prop.phi[:, 0, :] - e1)) <= 1e-8


def test_semigroup(sec4_aug):
    prop = propagate(sec4_aug, [0.0, 0.5, 1.0])
    half, full = prop.phi[1], prop.phi[2]
    assert np.linalg.norm(full - half @ half) <= 1e-8 * np.linalg.norm(half) ** 2


@pytest.mark.parametrize("grid", [[], [0.1, 0.2], [0.0, 0.5, 0.5], [0.0, 1.0, 0.5], [0.0, np.nan]])
def test_bad_grid(sec4_aug, grid):
    with pytest.raises(BadGridError):
        propagate(sec4_aug, grid)


def test_uniform_grid():
    g = uniform_grid(10, 0.01)
    assert len(g) == 1001 and g[0] == 0.0 and g[-1] == 10.0


# --- traces -----------------------------------------------------------------------------

def test_traces_plant_row(sec4_aug):
    res = coefficient_traces(sec4_aug, propagate(sec4_aug, uniform_grid(10, 0.05)))
    assert res.traces.shape == (6, 201, 11)
    np.testing.assert_allclose(res.traces[0, :, 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(res.traces[0, :, 1:], 0.0, atol=1e-12)
    assert res.residuals["plant_row"] <= 1e-12


def test_traces_at_zero_are_output_map(sec4_aug):
    res = coefficient_traces(sec4_aug, propagate(sec4_aug, [0.0, 1.0]))
    np.testing.assert_array_equal(res.traces[:, 0, :], sec4_aug.C_a)


def test_observer_traces_bounded(sec4_real, sec4_aug):
    res = coefficient_traces(sec4_aug, propagate(sec4_aug, uniform_grid(50, 0.05)))
    eigs = np.linalg.eigvalsh(sec4_real.R_o)
    bound = np.sqrt(eigs[-1] / eigs[0]) * np.linalg.norm(sec4_aug.C_a, 2) + 1
    assert np.max(np.abs(res.traces[1])) <= bound


# --- time averages -----------------------------------------------------------------------

def test_closed_form_matches_inverse_form(sec4_real, sec4_aug):
    # (1/T)(exp(A_o T) - I) A_o^{-1} == (1/2T)(exp(2 Theta R T) R^{-1} Theta^{-1} - R^{-1} Theta^{-1})
    R, Th = sec4_real.R_o, sec4_real.Theta_o
    RT = np.linalg.inv(R) @ np.linalg.inv(Th)
    for T in (0.7, 10.0, 123.4):
        avg = average_propagator(sec4_aug, T)[1:, 1:]
        other = (matrix_exp(2 * Th @ R, T) @ RT - RT) / (2 * T)
        np.testing.assert_allclose(avg, other, atol=1e-12)


def test_closed_form_small_horizon(sec4_aug):
    np.testing.assert_allclose(time_average_closed_form(sec4_aug, 1e-7), sec4_aug.C_a, atol=1e-6)


def test_closed_form_long_horizon(sec4_aug):
    avg = time_average_closed_form(sec4_aug, 1e6)
    target = np.zeros((5, 11))
    target[:, 0] = 1.0
    np.testing.assert_allclose(avg[1:], target, atol=1e-5)
    np.testing.assert_allclose(avg[0], np.eye(11)[0], atol=1e-12)


def test_closed_form_rejects_bad_horizon(sec4_aug):
    with pytest.raises(ValueError):
        time_average_closed_form(sec4_aug, 0.0)


def test_closed_form_singular_drift():
    aug = AugmentedSystem(np.zeros((3, 3)), np.eye(3)[:2])
    with pytest.raises(SingularDriftError):
        time_average_closed_form(aug, 1.0)


def test_closed_form_vs_simpson_oracle(sec4_aug):
    sums = simpson_running_sums(sec4_aug.C_a, sec4_aug.A_a, 1e-3, [10.0, 50.0, 100.0])
    for T, integral in sums.items():
        np.testing.assert_allclose(integral / T, time_average_closed_form(sec4_aug, T), atol=1e-6)


def test_quadrature_constant():
    t = uniform_grid(5, 0.1)
    res = SimulationResult(t, np.full((1, len(t), 1), 3.25))
    np.testing.assert_allclose(time_average_quadrature(res), 3.25, rtol=1e-14)


# trapezoid: |error of the average| <= h^2 max|f''| / 12 = 3.3e-5 for h = 0.01, f = sin 2t.
# simpson: the first panel falls back to a lower order rule; later points are far tighter.
@pytest.mark.parametrize("method, tol, tol_late", [("simpson", 1e-6, 1e-8), ("trapezoid", 3.4e-5, 3.4e-5)])
def test_quadrature_sine(method, tol, tol_late):
    t = uniform_grid(20, 0.01)
    res = SimulationResult(t, np.sin(2 * t)[None, :, None])
    avg = time_average_quadrature(res, method)[0, 1:, 0]
    T = t[1:]
    err = np.abs(avg - (1 - np.cos(2 * T)) / (2 * T))
    assert err.max() <= tol
    assert err[T > 1].max() <= tol_late


def test_quadrature_unknown_method():
    t = uniform_grid(1, 0.1)
    with pytest.raises(ValueError):
        time_average_quadrature(SimulationResult(t, np.zeros((1, len(t), 1))), "euler")


def test_quadrature_matches_closed_form(sec4_aug):
    grid = uniform_grid(100, 0.005)
    res = coefficient_traces(sec4_aug, propagate(sec4_aug, grid))
    avg = time_average_quadrature(res)
    for T in (10.0, 50.0, 100.0):
        m = int(round(T / 0.005))
        np.testing.assert_allclose(avg[:, m, :], time_average_closed_form(sec4_aug, T), atol=1e-6)


def test_running_average_closed_form_layout(sec4_aug):
    grid = uniform_grid(2, 0.5)
    avg = running_average_closed_form(sec4_aug, grid)
    assert avg.shape == (6, 5, 11)
    np.testing.assert_array_equal(avg[:, 0, :], sec4_aug.C_a)
    np.testing.assert_allclose(avg[:, 4, :], time_average_closed_form(sec4_aug, 2.0), rtol=1e-14)


def test_coarse_grid_warning(sec4_aug):
    res = coefficient_traces(sec4_aug, propagate(sec4_aug, uniform_grid(10, 0.6)))
    with pytest.warns(GridTooCoarseWarning):
        time_average_quadrature(res)
    res = coefficient_traces(sec4_aug, propagate(sec4_aug, uniform_grid(1, 0.01)))
    with warnings.catch_warnings():
        warnings.simplefilter("error", GridTooCoarseWarning)
        time_average_quadrature(res)


# --- convergence -----------------------------------------------------------------------------

def test_convergence_long_horizon(sec4_real, sec4_aug):
    rep = check_convergence(sec4_aug, sec4_real, [1000.0])
    assert rep.deviation[0] <= 0.01
    assert rep.within_bound


def test_convergence_bound_holds_on_many_horizons(sec4_real, sec4_aug):
    horizons = np.geomspace(1, 1e4, 40)
    rep = check_convergence(sec4_aug, sec4_real, horizons)
    assert rep.within_bound


def test_deviation_times_horizon_bounded(sec4_aug):
    scaled = [consensus_deviation(sec4_aug, T) * T for T in (100, 200, 400, 800)]
    assert max(scaled) / min(scaled) <= 2.0


def test_deviation_decays_like_inverse_horizon(sec4_aug):
    # geometric mean of the doubling ratios from 100 to 800
    d100, d800 = consensus_deviation(sec4_aug, 100), consensus_deviation(sec4_aug, 800)
    assert 0.3 <= (d800 / d100) ** (1 / 3) <= 0.7


@pytest.mark.parametrize("T", [50, 200])
def test_doubling_ratio(sec4_aug, T):
    ratio = consensus_deviation(sec4_aug, 2 * T) / consensus_deviation(sec4_aug, T)
    assert 0.3 <= ratio <= 0.7


def test_doubling_ratio_oscillates_at_100(sec4_aug):
    # D(T) T oscillates quasi-periodically, so a single doubling can leave [0.3, 0.7]
    ratio = consensus_deviation(sec4_aug, 200) / consensus_deviation(sec4_aug, 100)
    assert ratio == pytest.approx(0.7485, abs=1e-3)


def test_convergence_random_graphs(rng):
    for real, aug in random_realizations(rng, 20):
        rep = check_convergence(aug, real, [10.0, 100.0, 1000.0])
        assert rep.within_bound
        assert rep.deviation[-1] <= convergence_constant(real) / 1000 + 1e-12


# --- invariants --------------------------------------------------------------------------------

def test_hamiltonian_sec4(sec4_real, sec4_aug, rng):
    prop = propagate(sec4_aug, uniform_grid(50, 0.1))
    for _ in range(5):
        assert check_hamiltonian_conservation(sec4_real, rng.normal(size=10), prop) <= 1e-8


def test_hamiltonian_rejects_zero(sec4_real, sec4_aug):
    with pytest.raises(ValueError):
        check_hamiltonian_conservation(sec4_real, np.zeros(10), propagate(sec4_aug, [0.0]))


def test_rotation_preserves_norm():
    real = realization_unchecked(np.eye(2), [0, 0], [1, 0])
    grid = uniform_grid(10, 0.1)
    prop = propagate_matrix(real.A_o, grid)
    x = prop.phi @ np.array([1.0, 0.0])
    np.testing.assert_allclose(np.linalg.norm(x, axis=1), 1.0, atol=1e-13)
    assert check_hamiltonian_conservation(real, [1.0, 0.0], prop) <= 1e-11
    assert check_norm_bound(real, prop) == pytest.approx(1.0, abs=1e-11)


def test_symplectic_at_zero(sec4_real, sec4_aug):
    assert check_symplectic_ccr(sec4_real, propagate(sec4_aug, [0.0])) == 0.0


def test_symplectic_sec4(sec4_real, sec4_aug):
    assert check_symplectic_ccr(sec4_real, propagate(sec4_aug, uniform_grid(10, 0.05))) <= 1e-8


def test_symplectic_negative_control():
    # trace-positive drift is not Hamiltonian: Phi J Phi^T = e^{2t} J
    real = realization_unchecked(np.eye(2), [0, 0], [1, 0])
    prop = propagate_matrix(np.eye(2), uniform_grid(1, 0.1))
    res = check_symplectic_ccr(real, prop)
    assert res == pytest.approx(np.exp(2.0) - 1, rel=1e-12)


def test_diag_one_minus_one_is_hamiltonian():
    # diag(1, -1) = 2 J R with R symmetric, so it preserves J
    real = realization_unchecked(np.eye(2), [0, 0], [1, 0])
    prop = propagate_matrix(np.diag([1.0, -1.0]), uniform_grid(3, 0.1))
    assert check_symplectic_ccr(real, prop) <= 1e-12


def test_symplectic_detects_nonsymmetric_hamiltonian():
    real = realization_unchecked([[1.0, 0.5], [0.0, 1.0]], [0, 2], [1, 0])
    prop = propagate_matrix(real.A_o, uniform_grid(5, 0.1))
    assert check_symplectic_ccr(real, prop) > 0.1


def test_norm_bound_at_zero(sec4_real, sec4_aug):
    eigs = np.linalg.eigvalsh(sec4_real.R_o)
    ratio = check_norm_bound(sec4_real, propagate(sec4_aug, [0.0]))
    assert ratio == pytest.approx(np.sqrt(eigs[0] / eigs[-1]))


def test_norm_bound_sec4(sec4_real, sec4_aug):
    assert check_norm_bound(sec4_real, propagate(sec4_aug, uniform_grid(100, 0.1))) <= 1 + 1e-8


def test_propagator_size_mismatch(sec4_real):
    with pytest.raises(ValueError):
        check_norm_bound(sec4_real, propagate_matrix(np.zeros((3, 3)), [0.0]))


def test_spectrum_imaginary(sec4_real, rng):
    assert spectrum_real_part(sec4_real) <= 1e-10
    for real, _ in random_realizations(rng, 30):
        assert spectrum_real_part(real) <= 1e-10


def test_invariants_random_graphs(rng):
    grid = uniform_grid(50, 0.25)
    for real, aug in random_realizations(rng, 50):
        prop = propagate(aug, grid)
        assert np.max(np.abs(prop.phi[:, 0, :] - np.eye(prop.phi.shape[1])[0])) <= 1e-8
        assert check_symplectic_ccr(real, prop) <= 1e-8
        assert check_hamiltonian_conservation(real, rng.normal(size=2 * real.n_observers), prop) <= 1e-8
        assert check_norm_bound(real, prop) <= 1 + 1e-8
