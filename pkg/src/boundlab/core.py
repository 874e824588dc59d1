"""Uniform grids, wave samples and generic machinery for u'' + q(theta) u = 0.

The same equation carries the driven pendulum (theta = scaled time) and the
stationary wave problems (theta = scaled coordinate), so everything here is
agnostic about which one it is propagating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._kernels import numerov_kernel, rk4_kernel
from .errors import (
    BracketError,
    DegenerateSamples,
    DependentSolutions,
    DomainError,
    PropagationDiverged,
)

OVERFLOW_CAP = 1e150
DEFAULT_STEP = 1e-3
NODE_DEAD_BAND = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform lattice theta_i = start + i*step, i = 0..count-1."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0.0):
            raise ValueError("grid step must be positive")
        if self.count < 3:
            raise ValueError("grid needs at least 3 points")

    def point(self, i: int) -> float:
        return self.start + self.step * float(i)

    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count, dtype=float)

    @property
    def end(self) -> float:
        return self.point(self.count - 1)

    @classmethod
    def span(cls, start: float, end: float, step: float) -> "Grid":
        """Grid from start with the given step, covering up to end."""
        count = int(round((end - start) / step)) + 1
        return cls(start, step, count)

    @classmethod
    def aligned(cls, start: float, end: float, approx_step: float) -> "Grid":
        """Grid whose step is tuned so both start and end fall on nodes.

        The realized step differs from approx_step by at most half a cell
        over the whole span; use this when sharp potential edges must sit
        exactly on lattice points.
        """
        n = max(2, int(round((end - start) / approx_step)))
        return cls(start, (end - start) / n, n + 1)

    def index_of(self, theta: float) -> int:
        i = int(round((theta - self.start) / self.step))
        if i < 0 or i >= self.count:
            raise DomainError(f"theta {theta} outside grid")
        return i


@dataclass(frozen=True)
class WaveSamples:
    """Real samples of one solution on a grid; all values finite."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.count,):
            raise ValueError("sample count does not match grid")
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite samples")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class CoefficientField:
    """Deterministic evaluation rule theta -> q(theta).

    fn must accept numpy arrays.  domain is the interval on which the rule
    is declared valid; evaluation outside raises DomainError.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float] = (-math.inf, math.inf)

    def __call__(self, theta):
        th = np.asarray(theta, dtype=float)
        if th.size and (th.min() < self.domain[0] or th.max() > self.domain[1]):
            raise DomainError("evaluation outside declared field domain")
        out = np.asarray(self.fn(th), dtype=float)
        return np.broadcast_to(out, th.shape).copy() if out.shape != th.shape else out

    @classmethod
    def constant(cls, c: float) -> "CoefficientField":
        return cls(lambda th, c=float(c): np.full_like(th, c, dtype=float))

    @classmethod
    def from_samples(cls, w: WaveSamples) -> "CoefficientField":
        pts = w.grid.points()
        vals = w.values

        def fn(th, pts=pts, vals=vals):
            return np.interp(th, pts, vals)

        return cls(fn, (w.grid.start, w.grid.end))


def _as_field(q) -> CoefficientField:
    if isinstance(q, CoefficientField):
        return q
    return CoefficientField(lambda th, f=q: np.asarray(f(th), dtype=float))


def numerov_propagate(q, grid: Grid, u0: float, u1: float,
                      cap: float = OVERFLOW_CAP) -> WaveSamples:
    """Numerov propagation seeded with the first two samples.

    u_{n+1} = [2(1 - 5 h^2 q_n / 12) u_n - (1 + h^2 q_{n-1}/12) u_{n-1}]
              / (1 + h^2 q_{n+1}/12);  local truncation O(h^6).
    """
    qs = _as_field(q)(grid.points())
    u, idx = numerov_kernel(qs, grid.step, float(u0), float(u1), cap)
    if idx >= 0:
        raise PropagationDiverged(idx, cap)
    return WaveSamples(grid, u)


def rk_propagate_pair(q, grid: Grid, u: float, du: float,
                      cap: float = OVERFLOW_CAP) -> tuple[WaveSamples, WaveSamples]:
    """Propagate (u, u') with classical RK4; use when u' is the natural seed."""
    half = Grid(grid.start, grid.step / 2.0, 2 * grid.count - 1)
    qh = _as_field(q)(half.points())
    uu, dd, idx = rk4_kernel(qh, grid.step, float(u), float(du), cap)
    if idx >= 0:
        raise PropagationDiverged(idx, cap)
    return WaveSamples(grid, uu), WaveSamples(grid, dd)


def _sign_changes(values: np.ndarray, dead_band: float) -> int:
    peak = np.max(np.abs(values))
    if peak == 0.0:
        raise DegenerateSamples("degenerate samples")
    sig = values[np.abs(values) > dead_band * peak]
    if sig.size < 2:
        return 0
    s = np.sign(sig)
    return int(np.count_nonzero(s[1:] != s[:-1]))


def count_sign_changes(w: WaveSamples, dead_band: float = NODE_DEAD_BAND) -> int:
    """Strict sign alternations of the interior samples.

    Samples with |value| <= dead_band * max|values| are skipped so that
    roundoff wiggle in exponentially small tails does not register; the two
    endpoint samples are excluded.
    """
    if dead_band < 0:
        raise ValueError("dead_band must be >= 0")
    return _sign_changes(w.values[1:-1], dead_band)


def derivative(w: WaveSamples) -> WaveSamples:
    """Centered first derivative, one-sided second-order at the ends."""
    u = w.values
    h = w.grid.step
    d = np.empty_like(u)
    d[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    d[-1] = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    return WaveSamples(w.grid, d)


def wronskian_drift(w1: WaveSamples, w2: WaveSamples) -> float:
    """Relative drift of W = u1 u2' - u1' u2, which is exactly conserved.

    Returns max_i |W_i - W_0| / |W_0| over interior points; raises when the
    two solutions are (numerically) linearly dependent.
    """
    if w1.grid != w2.grid:
        raise ValueError("samples live on different grids")
    W = w1.values * derivative(w2).values - derivative(w1).values * w2.values
    if abs(W[0]) < 1e-14:
        raise DependentSolutions("dependent solutions")
    return float(np.max(np.abs(W[1:-1] - W[0])) / abs(W[0]))


def ode_residual(w: WaveSamples, q) -> float:
    """Scaled second-difference defect of samples against u'' + q u = 0."""
    u = w.values
    h = w.grid.step
    qs = _as_field(q)(w.grid.points())
    res = u[2:] - 2.0 * u[1:-1] + u[:-2] + h * h * qs[1:-1] * u[1:-1]
    return float(np.max(np.abs(res)) / (h * h * np.max(np.abs(u))))


def bracket_root(f, lo: float, hi: float, tol: float) -> float:
    """Deterministic bisection; requires a sign change over [lo, hi]."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError("bracket invalid")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def simpson(values: np.ndarray, step: float) -> float:
    """Composite Simpson on uniform samples; 3/8 rule absorbs an odd tail."""
    v = np.asarray(values, dtype=float)
    n = v.size - 1
    if n < 1:
        return 0.0
    if n == 1:
        return float(0.5 * step * (v[0] + v[1]))
    total = 0.0
    if n % 2 == 1:
        total += 3.0 * step / 8.0 * (v[n - 3] + 3.0 * v[n - 2] + 3.0 * v[n - 1] + v[n])
        v = v[: n - 2]
        n -= 3
        if n == 0:
            return float(total)
    total += step / 3.0 * (v[0] + v[-1] + 4.0 * np.sum(v[1:-1:2]) + 2.0 * np.sum(v[2:-1:2]))
    return float(total)


def integrate(w: WaveSamples) -> float:
    return simpson(w.values, w.grid.step)
