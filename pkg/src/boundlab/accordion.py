"""Bound states of the finite-window oscillating ("accordion") potential.

The potential v(theta) = v0 mu(theta) cos(theta + phase) averages to zero in
space but binds anyway: the wave function picks up a modulation locked in
antiphase to the potential wiggles, and the product of the two produces the
always-negative effective well

    v_eff(theta) = -(1/2pi) * integral(v^2, theta .. theta + 2pi).

The envelope pipeline solves A'' + [eta - v_eff] A = 0 and reconstructs
u = A (1 - v); the full solver treats v directly.  envelope_compare runs
both and quantifies the gap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._kernels import numerov_kernel, numerov_scan_kernel
from .core import (
    OVERFLOW_CAP,
    CoefficientField,
    Grid,
    WaveSamples,
    _sign_changes,
    simpson,
)
from .errors import (
    AnsatzError,
    DomainError,
    EmptyBracket,
    PropagationDiverged,
    WrongStateIndex,
)

TWO_PI = 2.0 * math.pi
DEFAULT_RAMP = TWO_PI   # one carrier period


@dataclass(frozen=True)
class WindowSpec:
    """Window function mu with 0 <= mu <= 1, plateau value 1, zero outside.

    rectangular: sharp edges at center +- half_width; mu = 1/2 exactly at an
    edge (midpoint convention, keeps grid-aligned edges fourth-order clean).
    raised_cosine: C^1 cosine ramps of the given length outside the plateau.
    """

    kind: Literal["rectangular", "raised_cosine"]
    center: float
    half_width: float
    ramp: float = 0.0

    def __post_init__(self):
        if self.half_width <= 0.0:
            raise ValueError("half_width must be positive")
        if self.kind == "raised_cosine":
            if self.ramp <= 0.0:
                raise ValueError("raised_cosine window needs ramp > 0")
        elif self.kind == "rectangular":
            if self.ramp != 0.0:
                raise ValueError("rectangular window takes no ramp")
        else:
            raise ValueError(f"unknown window kind {self.kind!r}")

    @property
    def support(self) -> tuple[float, float]:
        pad = self.ramp if self.kind == "raised_cosine" else 0.0
        return (self.center - self.half_width - pad,
                self.center + self.half_width + pad)

    def mu(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        d = np.abs(th - self.center)
        if self.kind == "rectangular":
            out = np.where(d < self.half_width, 1.0, 0.0)
            out = np.where(d == self.half_width, 0.5, out)
            return out
        out = np.zeros_like(th)
        out[d <= self.half_width] = 1.0
        on_ramp = (d > self.half_width) & (d < self.half_width + self.ramp)
        s = (d[on_ramp] - self.half_width) / self.ramp
        out[on_ramp] = 0.5 * (1.0 + np.cos(np.pi * s))
        return out


@dataclass(frozen=True)
class AccordionPotential:
    """v(theta) = amplitude * mu(theta) * cos(theta + phase)."""

    amplitude: float
    window: WindowSpec
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ValueError("amplitude must be >= 0")

    @property
    def support(self) -> tuple[float, float]:
        return self.window.support

    def __call__(self, theta) -> np.ndarray:
        th = np.asarray(theta, dtype=float)
        return self.amplitude * self.window.mu(th) * np.cos(th + self.phase)


def build_potential(spec: AccordionPotential) -> CoefficientField:
    """Coefficient field for v(theta); identically zero outside the window."""
    return CoefficientField(spec)


def effective_potential(v: CoefficientField, grid: Grid) -> WaveSamples:
    """Sliding one-period average of -v^2 on the grid points.

    The window [theta, theta + 2pi] is integrated with composite Simpson on
    the grid step plus an exact Gauss tail for the sub-step remainder, so
    the result is nonpositive by construction.  v must be evaluable 2pi
    beyond the last grid point.
    """
    h = grid.step
    k = int(math.floor(TWO_PI / h))
    if k % 2 == 1:
        k -= 1
    if k < 2:
        raise DomainError("insufficient grid: step too coarse for the sliding window")
    if grid.end + TWO_PI > v.domain[1] or grid.start < v.domain[0]:
        raise DomainError("insufficient grid: field domain must cover 2pi beyond the end")

    n = grid.count
    ext = Grid(grid.start, h, n + k)
    v2 = v(ext.points()) ** 2

    # parity-split cumulative sums give the Simpson panel sum per window
    c = np.concatenate([[0.0], np.cumsum(v2)])
    idx = np.arange(n + k)
    even_vals = np.where(idx % 2 == 0, v2, 0.0)
    ce = np.concatenate([[0.0], np.cumsum(even_vals)])
    i = np.arange(n)
    total = c[i + k + 1] - c[i]
    s_even_abs = ce[i + k + 1] - ce[i]
    s_opp = np.where(i % 2 == 0, total - s_even_abs, s_even_abs)
    # composite Simpson weights over the window: 1,4,2,...,2,4,1
    ends = v2[i] + v2[i + k]
    simpson_part = (h / 3.0) * (2.0 * total + 2.0 * s_opp - ends)

    tail = TWO_PI - k * h
    nodes, weights = np.polynomial.legendre.leggauss(5)
    t0 = grid.points() + k * h
    pts = t0[:, None] + (0.5 * tail) * (nodes[None, :] + 1.0)
    gauss_part = (0.5 * tail) * (v(pts.ravel()).reshape(pts.shape) ** 2) @ weights

    # the window integral of v^2 is nonnegative; the cumulative-sum
    # bookkeeping can undershoot zero by roundoff where v vanishes
    window = np.maximum(simpson_part + gauss_part, 0.0)
    return WaveSamples(grid, -window / TWO_PI)


@dataclass(frozen=True)
class EigenResult:
    """Converged bound state: eta < 0, wave normalized to unit square integral."""

    eta: float
    wave: WaveSamples
    nodes: int
    match_defect: float
    bracket_width: float

    def to_json_dict(self) -> dict:
        g = self.wave.grid
        return {
            "eta": self.eta,
            "nodes": self.nodes,
            "match_defect": self.match_defect,
            "grid": {"start": g.start, "step": g.step, "count": g.count},
            "values": [float(x) for x in self.wave.values],
        }

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f)


def _propagate_raw(q: np.ndarray, h: float, u0: float, u1: float) -> np.ndarray:
    u, idx = numerov_kernel(q, h, u0, u1, OVERFLOW_CAP)
    if idx >= 0:
        raise PropagationDiverged(idx, OVERFLOW_CAP)
    return u


class _Shooter:
    """Bidirectional Numerov shooting with decaying tails.

    Node bracketing uses the one-sided (left) solution across the whole
    domain: by Sturm oscillation its interior node count is exactly the
    number of eigenvalues below eta, which stays monotone where the count
    of the assembled two-sided solution can jump by two on symmetric wells.
    Off-eigenvalue sweeps grow exponentially, so scans run through the
    renormalizing kernel; only sign and neighbour ratios are consumed.
    """

    def __init__(self, v_samples: np.ndarray, grid: Grid, match_index: int,
                 dead_band: float):
        self.v = v_samples
        self.h = grid.step
        self.m = match_index
        self.dead_band = dead_band

    def _tails(self, eta: float) -> tuple[float, float]:
        kt = math.sqrt(-eta)
        return 1.0, math.exp(kt * self.h)

    def nodes_left(self, eta: float) -> int:
        u0, u1 = self._tails(eta)
        changes, _, _ = numerov_scan_kernel(eta - self.v, self.h, u0, u1)
        return changes

    def _ends(self, eta: float) -> tuple[np.ndarray, np.ndarray, int]:
        """Samples (m-1, m, m+1) of both one-sided sweeps, common scale flag."""
        m = self.m
        u0, u1 = self._tails(eta)
        _, endL, nL = numerov_scan_kernel(eta - self.v[: m + 2], self.h, u0, u1)
        _, endR, nR = numerov_scan_kernel((eta - self.v[m - 1:])[::-1], self.h, u0, u1)
        return endL, endR[::-1], nL + nR

    def mismatch(self, eta: float) -> tuple[float, int]:
        endL, endR, scale_count = self._ends(eta)
        duL = (endL[2] - endL[0]) / (2.0 * self.h)
        duR = (endR[2] - endR[0]) / (2.0 * self.h)
        return endL[1] * duR - duL * endR[1], scale_count

    def assemble(self, eta: float) -> tuple[np.ndarray, float]:
        m = self.m
        u0, u1 = self._tails(eta)
        uL = _propagate_raw(eta - self.v[: m + 2], self.h, u0, u1)
        uR = _propagate_raw((eta - self.v[m - 1:])[::-1], self.h, u0, u1)[::-1]
        duL = (uL[m + 1] - uL[m - 1]) / (2.0 * self.h)
        duR = (uR[2] - uR[0]) / (2.0 * self.h)
        scale = uL[m] / uR[1] if uR[1] != 0.0 else duL / duR
        u = np.concatenate([uL[: m + 1], uR[2:] * scale])
        denom = abs(uL[m] * duR) + abs(duL * uR[1])
        defect = abs(uL[m] * duR - duL * uR[1]) / denom if denom > 0 else math.inf
        return u, defect


def shoot_eigenvalue(v, eta_lo: float, eta_hi: float, target_nodes: int,
                     domain: Grid, match_point: float | None = None,
                     bracket_tol: float = 1e-10,
                     dead_band: float = 1e-10) -> EigenResult:
    """Bound state with the given node count by bidirectional shooting.

    Propagates from both ends with decaying seeds u ~ exp(-sqrt(|eta|) d),
    matches the logarithmic derivative at match_point (domain middle by
    default), and bisects eta: first on the Sturm node count to isolate one
    eigenvalue, then on the sign of the matching defect until the bracket
    is below bracket_tol.
    """
    if not (eta_lo < eta_hi < 0.0):
        raise ValueError("need eta_lo < eta_hi < 0")
    field = v if isinstance(v, CoefficientField) else CoefficientField(v)
    v_samples = field(domain.points())
    if match_point is None:
        match_point = 0.5 * (domain.start + domain.end)
    m = domain.index_of(match_point)
    m = min(max(m, 2), domain.count - 3)
    sh = _Shooter(v_samples, domain, m, dead_band)

    n_lo = sh.nodes_left(eta_lo)
    n_hi = sh.nodes_left(eta_hi)
    if n_lo > target_nodes or n_hi < target_nodes + 1:
        raise EmptyBracket("empty bracket")

    # shrink to a bracket holding exactly the target eigenvalue
    a, b = eta_lo, eta_hi
    while True:
        na, nb = sh.nodes_left(a), sh.nodes_left(b)
        if na == target_nodes and nb == target_nodes + 1:
            break
        mid = 0.5 * (a + b)
        if sh.nodes_left(mid) >= target_nodes + 1:
            b = mid
        else:
            a = mid
        if b - a < bracket_tol:
            break

    fa, sa = sh.mismatch(a)
    fb, sb = sh.mismatch(b)
    while b - a > bracket_tol:
        if (fa > 0) == (fb > 0):
            # defect did not flip inside the isolating bracket; fall back to
            # the node-count staircase, which jumps exactly at the eigenvalue
            mid = 0.5 * (a + b)
            if sh.nodes_left(mid) >= target_nodes + 1:
                b, (fb, sb) = mid, sh.mismatch(mid)
            else:
                a, (fa, sa) = mid, sh.mismatch(mid)
            continue
        mid = 0.5 * (a + b)
        fm, sm = sh.mismatch(mid)
        if (fm > 0) == (fa > 0):
            a, fa, sa = mid, fm, sm
        else:
            b, fb, sb = mid, fm, sm

    # secant polish inside the final bracket kills the residual defect;
    # valid only when both ends carry the same renormalization count
    eta = 0.5 * (a + b)
    if sa == sb and fb != fa:
        cand = a - fa * (b - a) / (fb - fa)
        if a <= cand <= b:
            eta = cand
    u, defect = sh.assemble(eta)
    u = u / math.sqrt(simpson(u * u, domain.step))
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    wave = WaveSamples(domain, u)
    nodes = _sign_changes(u[1:-1], dead_band)
    if nodes != target_nodes:
        raise WrongStateIndex("wrong state index")
    return EigenResult(eta, wave, nodes, defect, b - a)


@dataclass(frozen=True)
class EnvelopeReport:
    """Side-by-side result of the envelope pipeline and the full solver."""

    v_eff: WaveSamples
    eta_envelope: float
    eta_full: float
    relative_gap: float
    reconstructed: WaveSamples
    overlap: float
    envelope: WaveSamples
    full: WaveSamples


def accordion_domain(spec: AccordionPotential, h: float = 1e-3,
                     eta_scale: float | None = None) -> Grid:
    """Solution domain: window support plus five decay lengths per side."""
    if eta_scale is None:
        eta_scale = max(0.25 * spec.amplitude ** 2, 1e-4)
    margin = 5.0 / math.sqrt(eta_scale)
    lo, hi = spec.support
    return Grid.aligned(lo - margin, hi + margin, h)


def _ground_bracket(v_eff_min: float) -> tuple[float, float]:
    return 1.2 * v_eff_min, 0.02 * v_eff_min


def envelope_compare(spec: AccordionPotential, domain: Grid) -> EnvelopeReport:
    """Solve the envelope well and the full problem, then compare.

    The reconstruction uses u = A (1 - v): the first-order modulation
    coefficient is fixed to one, which is the value matching a pure cosine
    carrier (v''/v = -1).  Valid only for amplitude < 1.
    """
    if spec.amplitude >= 1.0:
        raise AnsatzError("ansatz out of validity")
    v_field = build_potential(spec)
    v_samples = v_field(domain.points())
    v_eff = effective_potential(v_field, domain)
    v_eff_min = float(np.min(v_eff.values))
    if v_eff_min >= 0.0:
        raise EmptyBracket("empty bracket")
    lo, hi = _ground_bracket(v_eff_min)
    center = 0.5 * (spec.support[0] + spec.support[1])

    env = shoot_eigenvalue(CoefficientField.from_samples(v_eff), lo, hi, 0,
                           domain, match_point=center)
    full = shoot_eigenvalue(v_field, lo, hi, 0, domain, match_point=center)

    rec = env.wave.values * (1.0 - v_samples)
    rec = rec / math.sqrt(simpson(rec * rec, domain.step))
    if rec[np.argmax(np.abs(rec))] < 0:
        rec = -rec
    overlap = simpson(full.wave.values * rec, domain.step) ** 2
    gap = abs(env.eta - full.eta) / abs(full.eta)
    return EnvelopeReport(v_eff, env.eta, full.eta, gap,
                          WaveSamples(domain, rec), overlap, env.wave, full.wave)


def write_envelope_csv(report: EnvelopeReport, spec: AccordionPotential, path) -> None:
    """Columns: theta, v, v_eff, u_full, u_reconstructed."""
    th = report.v_eff.grid.points()
    v = build_potential(spec)(th)
    with open(path, "w", newline="") as f:
        f.write("theta,v,v_eff,u_full,u_reconstructed\n")
        for row in zip(th, v, report.v_eff.values, report.full.values,
                       report.reconstructed.values):
            f.write(",".join(f"{x:.12g}" for x in row) + "\n")
