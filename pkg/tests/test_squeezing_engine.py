import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from config.settings import NUMERICS_CONFIG
from src.core.densela import eig_hermitian, evolve, expectation, uncertainty
from src.core.errors import AllPointsDegenerate, EmptyGrid, ValidationError
from src.core.models import ObservableMode, QuantumState, SqueezingPoint, SweepGrid
from src.core.spin_model import (
    coherent_state,
    collective_operator,
    mhz_to_rad_per_ns,
    secular_hamiltonian,
    site_operator,
)
from src.core.squeezing_engine import (
    RotationFrame,
    SqueezingEngine,
    analyze_tau,
    ellipse_closure,
    first_plateau_crossing,
    points_frame,
    rotate_x,
    sql_reference,
    squeezing_windows,
    summarize,
    tau_sweep,
    theta_sweep,
)
from src.scenarios.chain_scenario import scenario_chain
from src.scenarios.uniform_scenario import scenario_uniform


def _point(tau, sigma_b, degenerate=False):
    return SqueezingPoint(tau=tau, j_exp=(1.0, 0.0, 0.0), j_mag=1.0, delta_b=sigma_b, delta_a=1.0,
                          theta_opt=10.0 * tau, sigma_b=sigma_b, sigma_a=1.0, entropy=(0.0, 0.0),
                          degenerate=degenerate)


def test_sql_reference():
    assert sql_reference(1) == 1.0
    assert sql_reference(3) == pytest.approx(0.57735, abs=1e-5)
    assert sql_reference(4) == 0.5


def test_theta_sweep_on_coherent_state_is_isotropic(coarse_grid):
    delta_b, delta_a, theta_opt, samples = theta_sweep(coherent_state(3), coarse_grid)
    assert delta_b == pytest.approx(np.sqrt(3) / 2)
    assert delta_a == pytest.approx(np.sqrt(3) / 2)
    assert theta_opt == 0.0
    assert samples.j_mag == pytest.approx(1.5)
    sigma_y, sigma_z = samples.normalized()
    assert_allclose(sigma_y, 1 / np.sqrt(3))
    assert_allclose(sigma_z, 1 / np.sqrt(3))


def test_theta_sweep_rejects_empty_theta_list(coarse_grid):
    with pytest.raises(EmptyGrid):
        theta_sweep(coherent_state(2), coarse_grid, thetas_deg=[])


def test_rotation_frame_agrees_with_explicit_rotation():
    n = 3
    jx_eig = eig_hermitian(collective_operator(n, 'x'))
    psi = evolve(coherent_state(n), eig_hermitian(secular_hamiltonian(scenario_uniform(n, 1.0))), 89.0)
    frame = RotationFrame.build(jx_eig, {a: collective_operator(n, a) for a in 'xyz'})
    grid = SweepGrid(0.0, 10.0, 1.0, 0.0, 179.0, 1.0)
    _, _, _, samples = theta_sweep(psi, grid, frame)
    for k in (0, 37, 51, 128):
        rotated = rotate_x(psi, samples.theta_deg[k], jx_eig)
        assert samples.delta_y[k] == pytest.approx(uncertainty(rotated, collective_operator(n, 'y')), abs=1e-10)
        assert samples.delta_z[k] == pytest.approx(uncertainty(rotated, collective_operator(n, 'z')), abs=1e-10)


def test_quarter_turn_about_x_takes_up_spin_to_minus_y():
    up = QuantumState(np.array([1.0, 0.0]), 1)
    rotated = rotate_x(up, 90.0, eig_hermitian(collective_operator(1, 'x')))
    assert expectation(rotated, collective_operator(1, 'z')) == pytest.approx(0.0, abs=1e-12)
    assert expectation(rotated, collective_operator(1, 'y')) == pytest.approx(-0.5, abs=1e-12)


def test_rotate_x_rejects_non_finite_angle():
    jx_eig = eig_hermitian(collective_operator(2, 'x'))
    with pytest.raises(ValidationError):
        rotate_x(coherent_state(2), float('nan'), jx_eig)


def test_two_spin_mean_spin_matches_closed_form(coarse_grid):
    points = SqueezingEngine(scenario_uniform(2, 1.0), coarse_grid).run()
    d = mhz_to_rad_per_ns(1.0)
    for p in points:
        assert p.j_exp[0] == pytest.approx(np.cos(3 * d * p.tau / 4), abs=1e-9)


def test_three_spin_mean_spin_matches_closed_form(coarse_grid):
    points = SqueezingEngine(scenario_uniform(3, 1.0), coarse_grid).run()
    d = mhz_to_rad_per_ns(1.0)
    for p in points:
        assert p.j_exp[0] == pytest.approx(1.5 * np.cos(3 * d * p.tau / 4) ** 2, abs=1e-9)
        assert p.j_exp[1] == pytest.approx(0.0, abs=1e-9)
        assert p.j_exp[2] == pytest.approx(0.0, abs=1e-9)


def test_points_are_ordered_and_respect_robertson_bound(coarse_grid):
    points = SqueezingEngine(scenario_uniform(4, 1.0), coarse_grid, max_workers=3).run()
    taus = [p.tau for p in points]
    assert taus == sorted(taus)
    assert taus == list(coarse_grid.taus())
    for p in points:
        assert p.delta_b <= p.delta_a + 1e-12
        assert p.delta_b * p.delta_a >= abs(p.j_exp[0]) / 2 - 1e-10


def test_ellipse_closes_under_half_turn_and_quarter_swap(coarse_grid):
    psi0 = coherent_state(3)
    h_eig = eig_hermitian(secular_hamiltonian(scenario_uniform(3, 1.0)))
    for tau in (0.0, 89.0, 300.0):
        point = analyze_tau(psi0, h_eig, tau, coarse_grid)
        assert ellipse_closure(point.ellipse)
    full_turn = SweepGrid(0.0, 10.0, 1.0, 0.0, 359.0, 1.0)
    assert ellipse_closure(analyze_tau(psi0, h_eig, 89.0, full_turn).ellipse)


def test_zero_coupling_stays_at_standard_quantum_limit(coarse_grid):
    points, summary = tau_sweep(scenario_uniform(3, 0.0), coarse_grid)
    for p in points:
        assert p.sigma_b == pytest.approx(1 / np.sqrt(3), abs=1e-9)
        assert p.sigma_a == pytest.approx(1 / np.sqrt(3), abs=1e-9)
    assert summary.sigma_min == pytest.approx(summary.sigma_0, abs=1e-9)
    assert summary.tau_min == 0.0
    assert not summary.squeezed


def test_entropy_starts_at_zero(coarse_grid):
    points = SqueezingEngine(scenario_uniform(3, 1.0), coarse_grid).run()
    assert_allclose(points[0].entropy, 0.0, atol=1e-12)
    assert all(0.0 <= s <= np.log(2) + 1e-12 for p in points for s in p.entropy)


def test_single_site_mode_uses_global_rotation_on_chain():
    spec = scenario_chain(ObservableMode.single_site(1))
    psi = evolve(coherent_state(3), eig_hermitian(secular_hamiltonian(spec)), 700.0)
    frame = RotationFrame.for_mode(3, spec.observable_mode)
    grid = SweepGrid(0.0, 10.0, 1.0, 0.0, 179.0, 1.0)
    _, _, _, samples = theta_sweep(psi, grid, frame)
    sx1 = site_operator(3, 1, 'x').matrix
    sy1 = site_operator(3, 1, 'y')
    for k in (0, 45, 90, 129):
        local = expm(-1j * np.deg2rad(samples.theta_deg[k]) * sx1) @ psi.amplitudes
        rotated = QuantumState(local, 3)
        assert samples.delta_y[k] == pytest.approx(uncertainty(rotated, sy1), abs=1e-10)


def test_single_site_point_normalizes_by_site_spin():
    spec = scenario_chain(ObservableMode.single_site(1))
    point = analyze_tau(coherent_state(3), eig_hermitian(secular_hamiltonian(spec)), 0.0,
                        SweepGrid(), spec.observable_mode)
    assert point.j_mag == pytest.approx(0.5)
    assert point.sigma_b == pytest.approx(1.0)


def test_summary_prefers_earliest_of_equal_dips():
    sigmas = [0.9, 0.5, 0.8, 0.50005, 0.9]
    points = [_point(float(t), s) for t, s in enumerate(sigmas)]
    spec = scenario_uniform(2, 1.0)
    summary = summarize(points, spec, SweepGrid(0.0, 4.0, 1.0))
    assert summary.tau_min == 1.0
    assert summary.theta_min == 10.0


def test_summary_minimum_stays_within_dip_tolerance_of_global_minimum():
    sigmas = [0.9, 0.50005, 0.8, 0.5, 0.9]
    points = [_point(float(t), s) for t, s in enumerate(sigmas)]
    summary = summarize(points, scenario_uniform(2, 1.0), SweepGrid(0.0, 4.0, 1.0))
    assert summary.tau_min == 1.0
    assert summary.sigma_min == 0.50005
    assert summary.sigma_min <= min(sigmas) + NUMERICS_CONFIG['dip_tol']


def test_summary_flags_are_plain_python_types(coarse_grid):
    _, summary = tau_sweep(scenario_uniform(3, 1.0), coarse_grid)
    assert type(summary.squeezed) is bool
    assert type(summary.sigma_0) is float
    assert type(sql_reference(5)) is float


def test_summary_takes_deeper_dip_beyond_tolerance():
    sigmas = [0.9, 0.5, 0.8, 0.4, 0.9]
    points = [_point(float(t), s) for t, s in enumerate(sigmas)]
    summary = summarize(points, scenario_uniform(2, 1.0), SweepGrid(0.0, 4.0, 1.0))
    assert summary.tau_min == 3.0
    assert summary.sigma_min == 0.4


def test_summary_skips_degenerate_points_but_records_raw_minimum():
    points = [_point(0.0, 0.9), _point(1.0, 0.1, degenerate=True), _point(2.0, 0.6), _point(3.0, 0.7)]
    summary = summarize(points, scenario_uniform(2, 1.0), SweepGrid(0.0, 3.0, 1.0))
    assert summary.sigma_min == 0.6
    assert summary.sigma_min_raw == 0.1
    assert summary.tau_min_raw == 1.0
    assert summary.n_degenerate == 1


def test_summary_of_only_degenerate_points_fails():
    points = [_point(0.0, np.inf, degenerate=True)]
    with pytest.raises(AllPointsDegenerate):
        summarize(points, scenario_uniform(2, 1.0), SweepGrid(0.0, 1.0, 1.0))


def test_squeezing_windows():
    sigmas = [0.5, 0.4, 0.3, 0.6, 0.7, 0.45, 0.4]
    points = [_point(float(t), s) for t, s in enumerate(sigmas)]
    assert squeezing_windows(points, 0.5) == ((1.0, 2.0), (5.0, 6.0))


def test_first_plateau_crossing():
    flat = pd.DataFrame({'tau_ns': [0.0, 1.0], 'entropy_1': [0.0, 0.3]})
    assert first_plateau_crossing(flat) is None
    trace = pd.DataFrame({'tau_ns': [0.0, 1.0, 2.0, 3.0],
                          'entropy_1': [0.0, 0.2, 0.5, 0.1],
                          'entropy_2': [0.0, 0.69, 0.5, 0.693]})
    assert first_plateau_crossing(trace) == 1.0


def test_points_frame_columns():
    frame = points_frame([_point(0.0, 0.5), _point(1.0, 0.4)])
    assert list(frame.columns) == ['tau_ns', 'jx', 'jy', 'jz', 'j_mag', 'delta_b', 'delta_a',
                                   'theta_opt_deg', 'sigma_b', 'sigma_a', 'entropy_1', 'entropy_2',
                                   'degenerate_flag']
    assert len(frame) == 2


def test_odd_spin_counts_keep_mean_spin_non_negative(fine_grid):
    for n in (3, 5, 7, 9):
        eig = eig_hermitian(secular_hamiltonian(scenario_uniform(n, 1.0)))
        jx = collective_operator(n, 'x')
        values = [expectation(evolve(coherent_state(n), eig, tau), jx) for tau in fine_grid.taus()]
        assert min(values) >= -1e-9


def test_even_spin_counts_reverse_mean_spin(fine_grid):
    for n in (2, 4):
        eig = eig_hermitian(secular_hamiltonian(scenario_uniform(n, 1.0)))
        jx = collective_operator(n, 'x')
        values = [expectation(evolve(coherent_state(n), eig, tau), jx) for tau in fine_grid.taus()]
        assert min(values) == pytest.approx(-n / 2, rel=0.02)
