"""Radial problems in three and two dimensions.

3D, zero angular momentum: u'' + [eta - V(r)] u = 0 with u(0) = 0.  The wall
at the origin plus a finite-range oscillating potential make an effective
well that can hold a bound state; tuning the depth so a quarter period of
the zero-energy solution fits inside produces a state that merges into a
constant tail.  The full wave function psi = u/r then peaks at the origin
and decays like 1/r: localized but not square integrable.

2D, zero angular momentum: the radial reduction leaves the attractive
coefficient -1/(4 rho^2) behind.  Free solutions sqrt(rho) J0 show node
bunching toward the origin (gaps below pi); m = 1 shows anti-bunching.
sqrt(rho/pi) K0(rho) is the single normalizable negative-energy profile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import numerov_scan_kernel
from .accordion import AccordionPotential, EigenResult, _propagate_raw
from .bessel import bessel_j, bessel_k0, bessel_zeros
from .core import (
    CoefficientField,
    Grid,
    WaveSamples,
    _sign_changes,
    bracket_root,
    derivative,
    ode_residual,
    simpson,
)
from .errors import BracketError, DomainError, EmptyBracket, WrongStateIndex


@dataclass(frozen=True)
class RadialPotential3D:
    """Radial potential with support [0, r0]; V = 0 beyond r0.

    well_depth adds a uniform -well_depth on [0, r0] (the square-well
    degenerate case); modulation adds an oscillating component whose window
    must live inside [0, r0].
    """

    r0: float
    well_depth: float = 0.0
    modulation: AccordionPotential | None = None

    def __post_init__(self):
        if self.r0 <= 0.0:
            raise ValueError("r0 must be positive")
        if self.modulation is not None:
            lo, hi = self.modulation.support
            if lo < -1e-12 or hi > self.r0 + 1e-12:
                raise ValueError("modulation window must live inside [0, r0]")

    def __call__(self, r) -> np.ndarray:
        rr = np.asarray(r, dtype=float)
        out = np.zeros_like(rr)
        if self.well_depth != 0.0:
            inside = np.where(rr < self.r0, 1.0, 0.0)
            inside = np.where(rr == self.r0, 0.5, inside)
            out -= self.well_depth * inside
        if self.modulation is not None:
            out += self.modulation(rr)
        return out

    def field(self) -> CoefficientField:
        return CoefficientField(self, (0.0, math.inf))


def square_well(depth: float, r0: float) -> RadialPotential3D:
    return RadialPotential3D(r0=r0, well_depth=depth)


def radial_accordion(amplitude: float, r0: float, phase: float = 0.0) -> RadialPotential3D:
    """Oscillating potential filling [0, r0] with a sharp outer edge."""
    from .accordion import WindowSpec

    win = WindowSpec("rectangular", center=0.5 * r0, half_width=0.5 * r0)
    return RadialPotential3D(r0=r0, modulation=AccordionPotential(amplitude, win, phase))


def solve_radial_3d(potential: RadialPotential3D, eta_lo: float, eta_hi: float,
                    h: float = 1e-3, r_end: float | None = None,
                    target_nodes: int = 0,
                    bracket_tol: float = 1e-10) -> EigenResult:
    """Bound state of the radial problem by outward shooting from u(0) = 0.

    Seeds u(0) = 0, u(h) = h (exact leading behavior for zero angular
    momentum), bisects eta on the interior node count and then on the
    decay mismatch u'(r_end) + sqrt(|eta|) u(r_end).  Without an explicit
    r_end the domain is sized at ten decay lengths of the state itself,
    located by a cheap pre-solve on a short grid; an overlong tail would
    let the growing admixture drown the matching condition.
    """
    if not (eta_lo < eta_hi < 0.0):
        raise ValueError("need eta_lo < eta_hi < 0")
    if r_end is None:
        rough = solve_radial_3d(potential, eta_lo, eta_hi, h=max(h, 2e-3),
                                r_end=potential.r0 + 10.0,
                                target_nodes=target_nodes, bracket_tol=1e-6)
        r_end = potential.r0 + max(10.0, 10.0 / math.sqrt(-rough.eta))
    grid = Grid.span(0.0, r_end, h)
    v = potential(grid.points())

    def nodes_at(eta: float) -> int:
        changes, _, _ = numerov_scan_kernel(eta - v, h, 0.0, h)
        return changes

    def decay_root(eta: float) -> float:
        # decaying root of the constant-coefficient Numerov recurrence in
        # the force-free tail; exact discrete counterpart of exp(-kappa h)
        sigma = h * h * eta
        A = 1.0 + sigma / 12.0
        B = 1.0 - 5.0 * sigma / 12.0
        return (B - math.sqrt(B * B - A * A)) / A

    def mismatch(eta: float) -> tuple[float, int]:
        _, end3, nresc = numerov_scan_kernel(eta - v, h, 0.0, h)
        return end3[2] - decay_root(eta) * end3[1], nresc

    if nodes_at(eta_lo) > target_nodes or nodes_at(eta_hi) < target_nodes + 1:
        raise EmptyBracket("empty bracket")

    a, b = eta_lo, eta_hi
    while True:
        if nodes_at(a) == target_nodes and nodes_at(b) == target_nodes + 1:
            break
        mid = 0.5 * (a + b)
        if nodes_at(mid) >= target_nodes + 1:
            b = mid
        else:
            a = mid
        if b - a < bracket_tol:
            break

    fa, sa = mismatch(a)
    fb, sb = mismatch(b)
    while b - a > bracket_tol:
        if (fa > 0) == (fb > 0):
            mid = 0.5 * (a + b)
            if nodes_at(mid) >= target_nodes + 1:
                b, (fb, sb) = mid, mismatch(mid)
            else:
                a, (fa, sa) = mid, mismatch(mid)
            continue
        mid = 0.5 * (a + b)
        fm, sm = mismatch(mid)
        if (fm > 0) == (fa > 0):
            a, fa, sa = mid, fm, sm
        else:
            b, fb, sb = mid, fm, sm

    eta = 0.5 * (a + b)
    if sa == sb and fb != fa:
        cand = a - fa * (b - a) / (fb - fa)
        if a <= cand <= b:
            eta = cand
    u = _propagate_raw(eta - v, h, 0.0, h)
    lam = decay_root(eta)
    defect = abs(u[-1] / (lam * u[-2]) - 1.0)
    u = u / math.sqrt(simpson(u * u, h))
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    nodes = _sign_changes(u[1:-1], 1e-10)
    if nodes != target_nodes:
        raise WrongStateIndex("wrong state index")
    return EigenResult(eta, WaveSamples(grid, u), nodes, defect, b - a)


@dataclass(frozen=True)
class ZeroEnergyResult:
    """Depth-tuned zero-energy state; u constant beyond r0, psi = u/r."""

    tuned_depth: float
    u: WaveSamples
    psi: WaveSamples
    tail_flatness: float
    density_growth_slope: float

    def to_json_dict(self) -> dict:
        g = self.u.grid
        return {
            "tuned_depth": self.tuned_depth,
            "tail_flatness": self.tail_flatness,
            "density_growth_slope": self.density_growth_slope,
            "grid": {"start": g.start, "step": g.step, "count": g.count},
            "u": [float(x) for x in self.u.values],
            "psi": [float(x) for x in self.psi.values],
        }

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f)


def tune_zero_energy(make_potential, depth_lo: float, depth_hi: float,
                     h: float = 1e-3, r_end: float | None = None,
                     tol: float = 1e-10) -> ZeroEnergyResult:
    """Find the depth whose zero-energy outward solution has a flat tail.

    make_potential(depth) -> RadialPotential3D.  At zero energy the exterior
    solution is linear, so the tuning condition is exactly u'(r_end) = 0;
    depth is bisected on that sign.  The returned u is scaled so the tail
    constant is 1, hence psi = 1/r beyond r0.
    """
    probe = make_potential(0.5 * (depth_lo + depth_hi))
    r0 = probe.r0
    if r_end is None:
        r_end = r0 + 12.0
    grid = Grid.span(0.0, r_end, h)
    r = grid.points()

    def solve(depth: float) -> np.ndarray:
        v = make_potential(depth)(r)
        return _propagate_raw(-v, h, 0.0, h)

    def tail_slope(depth: float) -> float:
        u = solve(depth)
        return (u[-1] - u[-3]) / (2.0 * h)

    if tail_slope(depth_lo) * tail_slope(depth_hi) > 0:
        raise BracketError("bracket invalid")
    depth = bracket_root(tail_slope, depth_lo, depth_hi, tol)
    u = solve(depth)
    u = u / u[-2]
    psi = np.empty_like(u)
    psi[1:] = u[1:] / r[1:]
    psi[0] = u[1] / h
    tail = r >= r0 + 1.0
    flat = float(np.max(np.abs(u[tail] - u[-1])) / abs(u[-1]))
    i_lo = grid.index_of(r0 + 1.0)
    n_lo = simpson(u[: i_lo + 1] ** 2, h)
    n_hi = simpson(u ** 2, h)
    slope = (n_hi - n_lo) / (grid.end - grid.point(i_lo))
    return ZeroEnergyResult(depth, WaveSamples(grid, u), WaveSamples(grid, psi),
                            flat, slope)


@dataclass(frozen=True)
class DensityReport:
    """Shell content N(R) = integral(u^2, 0..R) and its growth diagnostics."""

    R_values: np.ndarray
    N_values: np.ndarray
    shell_slopes: np.ndarray
    slope_flatness: float
    argmax_density_index: int
    argmax_density_radius: float


def localized_density_report(z: ZeroEnergyResult, R_values) -> DensityReport:
    """Cumulative probability versus radius for the tuned state.

    Beyond r0 the density u^2 = |psi|^2 r^2 is constant, so N grows
    linearly: successive shells hold equal probability, the signature of a
    localized-but-not-normalizable state.  The density |psi|^2 itself peaks
    at the innermost grid point.
    """
    grid = z.u.grid
    u2 = z.u.values ** 2
    Rs = np.asarray(R_values, dtype=float)
    Ns = np.empty_like(Rs)
    for i, R in enumerate(Rs):
        idx = grid.index_of(R)
        Ns[i] = simpson(u2[: idx + 1], grid.step)
    slopes = np.diff(Ns) / np.diff(Rs)
    mean = float(np.mean(slopes))
    flat = float(np.max(np.abs(slopes - mean)) / abs(mean)) if slopes.size else 0.0
    dens = z.psi.values ** 2
    arg = int(np.argmax(dens))
    return DensityReport(Rs, Ns, slopes, flat, arg, grid.point(arg))


@dataclass(frozen=True)
class PlanarCentrifugal:
    """Effective radial coefficient for angular momentum m in two dimensions.

    q(rho) = eta - c(m)/rho^2 with c(m) = m^2 - 1/4: attractive for m = 0,
    weaker than the classical 1/rho^2 repulsion for m = 1.
    """

    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be >= 0")

    @property
    def coefficient(self) -> float:
        return self.m * self.m - 0.25

    def q_field(self, eta: float = 1.0,
                extra_potential: CoefficientField | None = None) -> CoefficientField:
        c = self.coefficient

        def fn(rho):
            q = eta - c / (rho * rho)
            if extra_potential is not None:
                q = q - extra_potential(rho)
            return q

        return CoefficientField(fn, (1e-12, math.inf))


def planar_free_state(m: int, grid: Grid) -> WaveSamples:
    """Free 2D radial solution sqrt(rho) J_m(rho); grid must start above 0."""
    if grid.start <= 0.0:
        raise DomainError("grid must start at rho > 0")
    rho = grid.points()
    return WaveSamples(grid, np.sqrt(rho) * bessel_j(m, rho))


@dataclass(frozen=True)
class BunchingSeries:
    """g_m(n) = pi / (j_{m,n+1} - j_{m,n}): node spacing against free space."""

    m: int
    zeros: np.ndarray
    gaps: np.ndarray
    g: np.ndarray


def bunching_series(m: int, n_max: int) -> BunchingSeries:
    """Spacing statistics of the first n_max zeros (gives n_max - 1 ratios)."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    table = bessel_zeros(m, n_max)
    gaps = table.gaps
    return BunchingSeries(m, table.zeros, gaps, math.pi / gaps)


@dataclass(frozen=True)
class K0StateReport:
    residual: float
    norm: float
    peak_rho: float
    steepness_inner_rho: float
    steepness_inner: float
    steepness_outer_rho: float
    steepness_outer: float


def k0_bound_state(grid: Grid) -> tuple[WaveSamples, K0StateReport]:
    """Profile sqrt(rho/pi) K0(rho) with its defining diagnostics.

    The profile solves u'' + [-1 + 1/(4 rho^2)] u = 0 away from the origin
    (energy -1 in units of the decay constant).  The report carries the
    equation residual, the squared-norm integral (1/(2 pi) over the full
    half-line), the peak of the band density rho |psi|^2 = u^2, and the
    logarithmic steepness u/sqrt(rho) near the origin.  The residual is
    evaluated away from the origin (rho >= 0.5 when the grid reaches that
    far): closer in, h^2/rho^2 is no longer small and the discrete defect
    measure stops being meaningful.
    """
    if grid.start < 1e-4:
        raise DomainError("grid must start at rho >= 1e-4")
    rho = grid.points()
    u = np.sqrt(rho / math.pi) * bessel_k0(rho)
    wave = WaveSamples(grid, u)
    q = CoefficientField(lambda x: -1.0 + 1.0 / (4.0 * x * x), (1e-12, math.inf))
    if grid.end > 0.5 + 2 * grid.step and grid.start < 0.5:
        i0 = grid.index_of(0.5)
        res = ode_residual(WaveSamples(Grid(grid.point(i0), grid.step,
                                            grid.count - i0), u[i0:]), q)
    else:
        res = ode_residual(wave, q)
    norm = simpson(u * u, grid.step)
    peak = grid.point(int(np.argmax(u)))

    def log_ratio(target: float) -> tuple[float, float]:
        idx = min(range(grid.count), key=lambda i: abs(grid.point(i) - target))
        r = grid.point(idx)
        return r, u[idx] / math.sqrt(r)

    ri, si = log_ratio(1e-3)
    ro, so = log_ratio(1e-1)
    return wave, K0StateReport(res, norm, peak, ri, si, ro, so)


def interior_extrema(w: WaveSamples, dead_band: float = 1e-4) -> int:
    """Sign alternations of the centered derivative above the dead band.

    A state that rises monotonically into a flat tail reports 0; a single
    interior maximum reports 1.
    """
    du = derivative(w).values[1:-1]
    return _sign_changes(du, dead_band)


def write_radial_csv(path, wave: WaveSamples) -> None:
    """Columns: r, u, psi, density (= psi^2); psi at r = 0 by its limit."""
    r = wave.grid.points()
    u = wave.values
    psi = np.empty_like(u)
    nz = r > 0
    psi[nz] = u[nz] / r[nz]
    if not nz.all():
        psi[~nz] = u[1] / wave.grid.step
    with open(path, "w", newline="") as f:
        f.write("r,u,psi,density\n")
        for row in zip(r, u, psi, psi ** 2):
            f.write(",".join(f"{x:.12g}" for x in row) + "\n")


def write_bunching_csv(path, series_list) -> None:
    """Columns: n, j_mn, gap, g for each series in turn."""
    with open(path, "w", newline="") as f:
        f.write("n,j_mn,gap,g\n")
        for series in series_list:
            for n in range(series.g.size):
                f.write(f"{n + 1},{series.zeros[n]:.12g},"
                        f"{series.gaps[n]:.12g},{series.g[n]:.12g}\n")
