import json
import math

import numpy as np
import pytest

from boundlab import (
    AccordionPotential,
    AnsatzError,
    CoefficientField,
    DomainError,
    EmptyBracket,
    Grid,
    WaveSamples,
    WindowSpec,
    accordion_domain,
    build_potential,
    effective_potential,
    envelope_compare,
    shoot_eigenvalue,
)
from boundlab.accordion import write_envelope_csv

from oracles import well_even_level_1d, well_odd_level_1d

H = 1e-3


def rect_spec(v0, width, center=0.0, phase=0.0):
    return AccordionPotential(v0, WindowSpec("rectangular", center=center,
                                             half_width=width / 2.0), phase)


def square_well_field(v0, width):
    """Degenerate accordion envelope: uniform -v0 inside the window."""
    hw = width / 2.0

    def fn(th):
        inside = np.where(np.abs(th) < hw, 1.0, 0.0)
        return -v0 * np.where(np.abs(th) == hw, 0.5, inside)

    return CoefficientField(fn)


def aligned_well_domain(width, margin):
    inner = Grid.aligned(-width / 2.0, width / 2.0, H)
    mcells = int(round(margin / inner.step))
    return Grid(-width / 2.0 - mcells * inner.step, inner.step,
                inner.count + 2 * mcells)


def test_build_potential_pointwise():
    spec = rect_spec(0.3, 20 * math.pi, center=10 * math.pi)
    v = build_potential(spec)
    assert abs(v(math.pi) - (-0.3)) < 1e-15
    assert v(-1.0) == 0.0
    assert v(20 * math.pi + 5.0) == 0.0


def test_build_potential_zero_amplitude():
    spec = rect_spec(0.0, 10 * math.pi)
    v = build_potential(spec)
    th = np.linspace(-40, 40, 1001)
    assert np.all(v(th) == 0.0)


def test_potential_integrates_to_zero():
    # whole carrier periods inside a rectangular window, carrier zero at
    # both edges so the quadrature sees no boundary jump
    spec = rect_spec(0.3, 8 * 2 * math.pi, phase=math.pi / 2)
    g = Grid.aligned(*spec.support, H)
    v = build_potential(spec)(g.points())
    from boundlab import simpson
    assert abs(simpson(v, g.step)) < 1e-10


def test_raised_cosine_window_shape():
    win = WindowSpec("raised_cosine", center=0.0, half_width=5.0, ramp=2.0)
    th = np.linspace(-8.0, 8.0, 2001)
    mu = win.mu(th)
    assert np.all((mu >= 0.0) & (mu <= 1.0))
    assert np.all(mu[np.abs(th) <= 5.0] == 1.0)
    assert np.all(mu[np.abs(th) >= 7.0] == 0.0)


def test_window_validation():
    with pytest.raises(ValueError):
        WindowSpec("rectangular", 0.0, -1.0)
    with pytest.raises(ValueError):
        WindowSpec("raised_cosine", 0.0, 1.0, ramp=0.0)
    with pytest.raises(ValueError):
        WindowSpec("gaussian", 0.0, 1.0)


def test_effective_potential_pure_cosine():
    f = CoefficientField(np.cos)
    g = Grid.span(0.0, 5.0, H)
    ve = effective_potential(f, g)
    assert np.max(np.abs(ve.values + 0.5)) < 1e-10


def test_effective_potential_zero():
    f = CoefficientField.constant(0.0)
    g = Grid.span(0.0, 5.0, H)
    ve = effective_potential(f, g)
    assert np.all(ve.values == 0.0)


def test_effective_potential_plateau_value():
    spec = rect_spec(0.3, 20 * math.pi, center=10 * math.pi)
    g = Grid.span(8 * math.pi, 12 * math.pi, H)
    ve = effective_potential(build_potential(spec), g)
    mid = g.index_of(10 * math.pi)
    assert abs(ve.values[mid] - (-0.5 * 0.3 ** 2)) < 1e-6


def test_effective_potential_nonpositive_everywhere():
    spec = AccordionPotential(
        0.4, WindowSpec("raised_cosine", 0.0, 8 * math.pi, ramp=2 * math.pi), 0.7)
    g = Grid.span(-40.0, 40.0, H)
    ve = effective_potential(build_potential(spec), g)
    assert np.all(ve.values <= 0.0)


def test_effective_potential_insufficient_domain():
    g0 = Grid.span(0.0, 5.0, H)
    sampled = CoefficientField.from_samples(
        WaveSamples(g0, np.cos(g0.points())))
    with pytest.raises(DomainError):
        effective_potential(sampled, g0)


def test_shoot_square_well_against_transcendental_root():
    width, v0 = 20 * math.pi, 0.045
    eta0 = well_even_level_1d(v0, width)
    dom = aligned_well_domain(width, 5.0 / math.sqrt(abs(eta0)))
    res = shoot_eigenvalue(square_well_field(v0, width), -0.0449, -1e-4, 0,
                           dom, match_point=0.0)
    assert abs(res.eta - eta0) < 1e-8
    assert res.nodes == 0
    assert res.match_defect < 1e-6
    assert res.bracket_width < 1e-9
    # normalized
    from boundlab import integrate
    assert abs(integrate(WaveSamples(dom, res.wave.values ** 2)) - 1.0) < 1e-8


def test_shoot_node_ordering():
    width, v0 = 20 * math.pi, 0.045
    eta0 = well_even_level_1d(v0, width)
    eta1 = well_odd_level_1d(v0, width)
    dom = aligned_well_domain(width, 5.0 / math.sqrt(abs(eta0)))
    field = square_well_field(v0, width)
    r0 = shoot_eigenvalue(field, -0.0449, -1e-4, 0, dom, match_point=0.0)
    r1 = shoot_eigenvalue(field, -0.0449, -1e-4, 1, dom, match_point=0.0)
    assert r0.eta < r1.eta < 0.0
    assert abs(r1.eta - eta1) < 1e-8


def test_shoot_no_state_without_modulation():
    dom = Grid.span(-60.0, 60.0, H)
    with pytest.raises(EmptyBracket):
        shoot_eigenvalue(CoefficientField.constant(0.0), -0.0449, -1e-4, 0, dom)


def test_shoot_accordion_bounded_by_envelope_depth():
    spec = rect_spec(0.3, 20 * math.pi)
    dom = accordion_domain(spec, h=H)
    res = shoot_eigenvalue(build_potential(spec), -0.054, -9e-4, 0, dom,
                           match_point=0.0)
    assert -0.045 < res.eta < 0.0
    assert res.nodes == 0


def test_ground_state_modulation_anticorrelated_with_potential():
    # at carrier extrema inside the plateau the wave deviates opposite to v
    spec = rect_spec(0.3, 20 * math.pi)
    dom = accordion_domain(spec, h=H)
    res = shoot_eigenvalue(build_potential(spec), -0.054, -9e-4, 0, dom,
                           match_point=0.0)
    u = res.wave.values
    v = build_potential(spec)
    for k in range(-6, 7):
        theta = k * math.pi   # carrier extremum (phase 0)
        i = dom.index_of(theta)
        ip = dom.index_of(theta + math.pi)
        im = dom.index_of(theta - math.pi)
        deviation = u[i] - 0.5 * (u[ip] + u[im])
        assert deviation * float(v(theta)) < 0.0


def test_eta_decreases_with_amplitude():
    etas = []
    for v0 in (0.1, 0.3, 0.5):
        spec = rect_spec(v0, 20 * math.pi)
        dom = accordion_domain(spec, h=H)
        lo = -0.6 * v0 ** 2
        res = shoot_eigenvalue(build_potential(spec), lo, 0.02 * lo / 1.2, 0,
                               dom, match_point=0.0)
        etas.append(res.eta)
    assert etas[0] > etas[1] > etas[2]


def test_binding_deepens_with_window_width():
    etas = []
    v0 = 0.3
    for periods in (5, 10, 20):
        spec = rect_spec(v0, periods * 2 * math.pi)
        dom = accordion_domain(spec, h=H)
        res = shoot_eigenvalue(build_potential(spec), -0.054, -9e-4, 0, dom,
                               match_point=0.0)
        etas.append(res.eta)
    assert etas[0] > etas[1] > etas[2] > -0.5 * v0 ** 2


def test_envelope_compare_midsize():
    spec = rect_spec(0.2, 30 * math.pi)
    dom = accordion_domain(spec, h=H)
    rep = envelope_compare(spec, dom)
    assert rep.relative_gap < 0.2
    assert rep.overlap > 0.95
    assert np.all(rep.v_eff.values <= 0.0)


def test_envelope_compare_small_amplitude():
    spec = rect_spec(0.05, 60 * math.pi)
    dom = accordion_domain(spec, h=H)
    rep = envelope_compare(spec, dom)
    assert rep.relative_gap < 0.1


def test_envelope_compare_no_modulation():
    spec = rect_spec(0.0, 30 * math.pi)
    dom = accordion_domain(spec, h=H)
    with pytest.raises(EmptyBracket):
        envelope_compare(spec, dom)


def test_envelope_compare_ansatz_limit():
    spec = rect_spec(1.0, 30 * math.pi)
    dom = Grid.span(-10.0, 10.0, 1e-2)
    with pytest.raises(AnsatzError):
        envelope_compare(spec, dom)


def test_eigenresult_json_schema(tmp_path):
    width, v0 = 20 * math.pi, 0.045
    dom = aligned_well_domain(width, 30.0)
    res = shoot_eigenvalue(square_well_field(v0, width), -0.0449, -1e-4, 0,
                           dom, match_point=0.0)
    path = tmp_path / "state.json"
    res.write_json(path)
    data = json.loads(path.read_text())
    assert set(data) == {"eta", "nodes", "match_defect", "grid", "values"}
    assert set(data["grid"]) == {"start", "step", "count"}
    assert len(data["values"]) == data["grid"]["count"]


def test_envelope_csv_columns(tmp_path):
    spec = rect_spec(0.2, 10 * math.pi)
    dom = accordion_domain(spec, h=2e-3)
    rep = envelope_compare(spec, dom)
    path = tmp_path / "envelope.csv"
    write_envelope_csv(rep, spec, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta,v,v_eff,u_full,u_reconstructed"
    assert len(lines) == 1 + dom.count
