import math

import numpy as np
import pytest

from boundlab import (
    BracketError,
    CoefficientField,
    DomainError,
    EmptyBracket,
    Grid,
    PlanarCentrifugal,
    RadialPotential3D,
    bunching_series,
    interior_extrema,
    k0_bound_state,
    localized_density_report,
    planar_free_state,
    radial_accordion,
    solve_radial_3d,
    square_well,
    tune_zero_energy,
)
from boundlab.accordion import _propagate_raw
from boundlab.radial import write_bunching_csv, write_radial_csv

from oracles import well_level_3d

H = 1e-3

# frozen from the quadrature/bisection oracles
K0_PEAK = 0.16572151618344255
G0_1 = 1.0084552056554683      # pi / (j_{0,2} - j_{0,1})
G1_1 = 0.9867180808559173      # pi / (j_{1,2} - j_{1,1})

ACC_R0 = 6 * math.pi
ACC_PHASE = 5.1


def test_square_well_against_transcendental_root():
    # the potential jump costs O(h^2) in eta, so this check runs at h = 5e-4
    eta0 = well_level_3d(2.8, 1.0)
    res = solve_radial_3d(square_well(2.8, 1.0), -2.79, -0.01, h=5e-4)
    assert abs(res.eta - eta0) < 1e-8
    assert res.nodes == 0
    assert res.match_defect < 1e-6
    assert interior_extrema(res.wave) == 1


def test_square_well_below_quarter_period_threshold():
    # binding needs depth > pi^2/4 on r0 = 1
    with pytest.raises(EmptyBracket):
        solve_radial_3d(square_well(2.0, 1.0), -1.99, -1e-3, r_end=30.0)


def test_radial_accordion_ground_state():
    res = solve_radial_3d(radial_accordion(0.35, ACC_R0, ACC_PHASE),
                          -0.6 * 0.35 ** 2, -1e-3)
    assert res.eta < 0.0
    assert res.nodes == 0


def test_no_binding_without_potential():
    with pytest.raises(EmptyBracket):
        solve_radial_3d(RadialPotential3D(r0=1.0), -1.0, -1e-3, r_end=20.0)


def test_potential_vanishes_beyond_r0():
    pot = radial_accordion(0.35, ACC_R0, ACC_PHASE)
    r = np.linspace(ACC_R0 + 1e-9, ACC_R0 + 30.0, 100)
    assert np.all(pot(r) == 0.0)
    with pytest.raises(ValueError):
        RadialPotential3D(r0=-1.0)


def test_tuned_depth_square_well_r0_1():
    z = tune_zero_energy(lambda d: square_well(d, 1.0), 1.0, 4.0)
    assert abs(z.tuned_depth - math.pi ** 2 / 4.0) < 1e-6
    assert z.u.values[0] == 0.0
    assert z.tail_flatness < 1e-6


def test_tuned_depth_square_well_r0_2():
    z = tune_zero_energy(lambda d: square_well(d, 2.0), 0.2, 2.0)
    assert abs(z.tuned_depth - math.pi ** 2 / 16.0) < 1e-6


def test_tuned_depth_quarter_period_scaling():
    z1 = tune_zero_energy(lambda d: square_well(d, 1.0), 1.0, 4.0)
    z2 = tune_zero_energy(lambda d: square_well(d, 2.0), 0.2, 2.0)
    assert abs(z1.tuned_depth / z2.tuned_depth - 4.0) < 1e-4


def test_tuned_accordion_flat_tail_and_single_maximum():
    z = tune_zero_energy(lambda d: radial_accordion(d, ACC_R0, ACC_PHASE),
                         0.01, 0.12)
    assert z.tail_flatness < 1e-6
    assert interior_extrema(z.u) == 1
    # the rise is monotone: the lone extremum is the hump joining the tail
    peak = np.argmax(z.u.values)
    assert np.all(np.diff(z.u.values[: peak]) > -1e-12)


def test_tune_zero_energy_bad_bracket():
    with pytest.raises(BracketError):
        tune_zero_energy(lambda d: square_well(d, 1.0), 0.1, 0.5)


def test_zero_energy_psi_decays_like_inverse_radius():
    z = tune_zero_energy(lambda d: square_well(d, 1.0), 1.0, 4.0)
    r = z.u.grid.points()
    tail = r >= 2.0
    assert np.max(np.abs(z.psi.values[tail] * r[tail] - 1.0)) < 1e-8


def test_density_report_linear_growth_and_origin_peak():
    z = tune_zero_energy(lambda d: square_well(d, 1.0), 1.0, 4.0,
                         r_end=16.0)
    rep = localized_density_report(z, [5.0, 10.0, 15.0])
    shell_a = rep.N_values[1] - rep.N_values[0]
    shell_b = rep.N_values[2] - rep.N_values[1]
    assert abs(shell_a - shell_b) / shell_a < 0.01
    assert rep.argmax_density_index == 0
    assert np.all(np.isfinite(rep.N_values))


def test_free_3d_nodes_equally_spaced():
    # V = 0, eta = 1: u ~ sin(r); node gaps are pi, the 3D contrast baseline
    grid = Grid.span(0.0, 40.0, H)
    u = _propagate_raw(np.ones(grid.count), H, 0.0, H)
    sign = np.sign(u[1:-1])
    flips = np.where(sign[1:] != sign[:-1])[0]
    gaps = np.diff(grid.points()[flips + 1])
    assert np.max(np.abs(gaps - math.pi)) < 1e-3


def test_planar_free_state_zero_crossing():
    grid = Grid.span(0.1, 12.0, H)
    w0 = planar_free_state(0, grid)
    j01 = 2.404825557695773
    assert abs(w0.values[grid.index_of(j01)]) < 1e-8


def test_planar_free_state_small_rho_behavior():
    grid = Grid(1e-3, 1e-4, 50)
    rho = grid.points()
    w0 = planar_free_state(0, grid)
    assert np.max(np.abs(w0.values / np.sqrt(rho) - 1.0)) < 2e-6
    w1 = planar_free_state(1, grid)
    assert np.max(np.abs(w1.values / (rho ** 1.5 / 2.0) - 1.0)) < 1e-5


def test_planar_free_state_residuals():
    grid = Grid.span(0.5, 20.0, H)
    for m, c in ((0, -0.25), (1, 0.75)):
        w = planar_free_state(m, grid)
        q = CoefficientField(lambda x, c=c: 1.0 - c / (x * x))
        from boundlab import ode_residual
        assert ode_residual(w, q) < 1e-4


def test_planar_free_state_needs_positive_start():
    with pytest.raises(DomainError):
        planar_free_state(0, Grid(0.0, 1e-3, 100))


def test_bunching_first_values():
    b0 = bunching_series(0, 2)
    b1 = bunching_series(1, 2)
    assert abs(b0.g[0] - G0_1) < 1e-9
    assert abs(b1.g[0] - G1_1) < 1e-9
    assert b0.g[0] > 1.0 > b1.g[0]


def test_bunching_signs_and_approach():
    b0 = bunching_series(0, 31)
    b1 = bunching_series(1, 31)
    assert np.all(b0.g > 1.0)
    assert np.all(b1.g < 1.0)
    assert np.all(np.diff(np.abs(b0.g - 1.0)) < 0.0)
    assert np.all(np.diff(np.abs(b1.g - 1.0)) < 0.0)


def test_bunching_far_tail():
    b0 = bunching_series(0, 51)
    assert 1.0 < b0.g[49] < 1.0001


def test_bunching_requires_two_zeros():
    with pytest.raises(ValueError):
        bunching_series(0, 1)


def test_planar_centrifugal_coefficients():
    assert PlanarCentrifugal(0).coefficient == -0.25
    assert PlanarCentrifugal(1).coefficient == 0.75
    with pytest.raises(ValueError):
        PlanarCentrifugal(-1)


def test_planar_centrifugal_composed_field():
    # accordion plus the attractive quantum term, ready for the 1D shooter
    spec_pot = CoefficientField(lambda r: 0.1 * np.cos(r))
    q = PlanarCentrifugal(0).q_field(eta=-0.05, extra_potential=spec_pot)
    rho = np.array([0.5, 1.0, 2.0])
    expected = -0.05 + 0.25 / rho ** 2 - 0.1 * np.cos(rho)
    assert np.max(np.abs(q(rho) - expected)) < 1e-14


def test_k0_state_residual_window():
    grid = Grid.span(0.5, 8.0, H)
    _, rep = k0_bound_state(grid)
    assert rep.residual < 1e-4


def test_k0_state_norm():
    grid = Grid.span(1e-4, 40.0, H)
    _, rep = k0_bound_state(grid)
    assert abs(rep.norm - 1.0 / (2.0 * math.pi)) < 1e-6


def test_k0_state_peak_location():
    grid = Grid.span(1e-4, 40.0, H)
    _, rep = k0_bound_state(grid)
    assert abs(rep.peak_rho - K0_PEAK) <= grid.step


def test_k0_state_logarithmic_steepness():
    grid = Grid.span(1e-4, 2.0, 1e-4)
    _, rep = k0_bound_state(grid)
    assert rep.steepness_inner > rep.steepness_outer > 0.0


def test_k0_state_grid_guard():
    with pytest.raises(DomainError):
        k0_bound_state(Grid(1e-5, 1e-3, 100))


def test_k0_exponential_tail_envelope():
    # ln u0 + rho is pinned near ln sqrt(1/2) once the asymptotic regime sets in
    grid = Grid.span(5.0, 20.0, H)
    wave, _ = k0_bound_state(grid)
    comb = np.log(wave.values) + grid.points()
    mid = 0.5 * (comb.max() + comb.min())
    assert comb.max() - comb.min() < 0.04
    assert abs(mid - 0.5 * math.log(0.5)) < 0.02


def test_radial_csv_roundtrip(tmp_path):
    z = tune_zero_energy(lambda d: square_well(d, 1.0), 1.0, 4.0)
    path = tmp_path / "radial.csv"
    write_radial_csv(path, z.u)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,u,psi,density"
    assert len(lines) == 1 + z.u.grid.count
    r, u, psi, dens = (float(x) for x in lines[500].split(","))
    assert abs(psi - u / r) < 1e-12
    assert abs(dens - psi * psi) < 1e-12


def test_bunching_csv(tmp_path):
    path = tmp_path / "bunching.csv"
    write_bunching_csv(path, [bunching_series(0, 5), bunching_series(1, 5)])
    lines = path.read_text().splitlines()
    assert lines[0] == "n,j_mn,gap,g"
    assert len(lines) == 1 + 2 * 4
