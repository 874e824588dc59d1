"""Floquet stability of the driven oscillator phi'' + [kappa + a(theta)] phi = 0.

kappa < 0 is the inverted (upside-down) configuration; a(theta) is a
zero-mean drive with period 2*pi.  Stability is read off the trace of the
one-period transfer (monodromy) matrix: |trace| < 2 stable, > 2 unstable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import CoefficientField, Grid, bracket_root, rk_propagate_pair, simpson
from .errors import BracketError, PropagationDiverged

TWO_PI = 2.0 * math.pi
MARGINAL_TOL = 1e-6
DEFAULT_STEPS_PER_PERIOD = 4000


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


def _check_zero_mean(waveform: Callable) -> None:
    th = np.linspace(0.0, TWO_PI, 4097)
    mean = simpson(np.asarray(waveform(th), dtype=float), th[1] - th[0]) / TWO_PI
    if abs(mean) > 1e-8:
        raise ValueError("drive waveform must have zero mean over one period")


@dataclass(frozen=True)
class PendulumParams:
    """Dimensionless drive configuration.

    kappa: steepness (negative for the physical inverted pendulum, any real
    for charting); drive_amplitude: alpha >= 0; drive_waveform: 2*pi-periodic
    zero-mean shape, cos by default.
    """

    kappa: float
    drive_amplitude: float = 0.0
    drive_waveform: Callable = field(default=np.cos)

    def __post_init__(self):
        if self.drive_waveform is not np.cos:
            _check_zero_mean(self.drive_waveform)

    def coefficient(self) -> CoefficientField:
        k, a, w = self.kappa, self.drive_amplitude, self.drive_waveform
        return CoefficientField(lambda th: k + a * np.asarray(w(th), dtype=float))


def from_physical(g: float, length: float, nu: float, f_amplitude: float) -> PendulumParams:
    """Reduce (g, L, drive frequency, drive amplitude) to dimensionless form.

    For a support displacement f(t) = f_amplitude cos(nu t) measured in
    theta = nu t: kappa = -(g/L)/nu^2 and a(theta) = -(f_amplitude/L) cos
    theta, so the sign sits in the waveform.
    """
    if min(g, length, nu, f_amplitude) <= 0.0:
        raise ValueError("physical parameters must be positive")
    kappa = -(g / length) / (nu * nu)
    alpha = f_amplitude / length
    return PendulumParams(kappa, alpha, lambda th: -np.cos(th))


@dataclass(frozen=True)
class MonodromyResult:
    m11: float
    m12: float
    m21: float
    m22: float
    trace: float
    determinant: float
    classification: Stability
    diverged: bool = False


def _classify(trace: float) -> Stability:
    if abs(trace) < 2.0 - MARGINAL_TOL:
        return Stability.STABLE
    if abs(trace) > 2.0 + MARGINAL_TOL:
        return Stability.UNSTABLE
    return Stability.MARGINAL


def _monodromy_of_field(q: CoefficientField, steps_per_period: int) -> MonodromyResult:
    grid = Grid(0.0, TWO_PI / steps_per_period, steps_per_period + 1)
    try:
        ua, dua = rk_propagate_pair(q, grid, 1.0, 0.0)
        ub, dub = rk_propagate_pair(q, grid, 0.0, 1.0)
    except PropagationDiverged:
        return MonodromyResult(math.inf, math.inf, math.inf, math.inf,
                               math.inf, 1.0, Stability.UNSTABLE, diverged=True)
    m11, m21 = ua.values[-1], dua.values[-1]
    m12, m22 = ub.values[-1], dub.values[-1]
    return MonodromyResult(m11, m12, m21, m22, m11 + m22,
                           m11 * m22 - m12 * m21, _classify(m11 + m22))


def monodromy(params: PendulumParams,
              steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> MonodromyResult:
    """One-period transfer matrix from the two fundamental solutions.

    Columns are the solutions with (phi, phi') = (1, 0) and (0, 1) at
    theta = 0.  The equation has no first-derivative term, so det = 1.
    Divergence during propagation is reported as Unstable, not an abort.
    """
    if steps_per_period < 100:
        raise ValueError("steps_per_period must be >= 100")
    return _monodromy_of_field(params.coefficient(), steps_per_period)


@dataclass(frozen=True)
class StabilityChart:
    """Classification of monodromy over a (kappa, alpha) lattice."""

    kappas: np.ndarray
    alphas: np.ndarray
    classifications: np.ndarray   # Stability values, shape (n_kappa, n_alpha)
    traces: np.ndarray
    determinants: np.ndarray

    @property
    def stable(self) -> np.ndarray:
        return np.vectorize(lambda c: c is Stability.STABLE)(self.classifications)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            f.write("kappa,alpha,stable\n")
            st = self.stable
            for i, k in enumerate(self.kappas):
                for j, a in enumerate(self.alphas):
                    f.write(f"{k:.12g},{a:.12g},{1 if st[i, j] else 0}\n")


def stability_chart(kappa_range: tuple[float, float],
                    alpha_range: tuple[float, float],
                    resolution: int | tuple[int, int],
                    waveform: Callable = np.cos,
                    steps_per_period: int = 1200) -> StabilityChart:
    """Cell-by-cell monodromy classification; cells are independent."""
    if isinstance(resolution, int):
        res_k = res_a = resolution
    else:
        res_k, res_a = resolution
    if res_k < 2 or res_a < 2:
        raise ValueError("resolution must be >= 2 per axis")
    if steps_per_period < 100:
        raise ValueError("steps_per_period must be >= 100")
    if waveform is not np.cos:
        _check_zero_mean(waveform)
    kappas = np.linspace(kappa_range[0], kappa_range[1], res_k)
    alphas = np.linspace(alpha_range[0], alpha_range[1], res_a)
    cls = np.empty((res_k, res_a), dtype=object)
    traces = np.empty((res_k, res_a))
    dets = np.empty((res_k, res_a))
    for i, k in enumerate(kappas):
        for j, a in enumerate(alphas):
            q = CoefficientField(
                lambda th, k=float(k), a=float(a): k + a * np.asarray(waveform(th), dtype=float))
            res = _monodromy_of_field(q, steps_per_period)
            cls[i, j] = res.classification
            traces[i, j] = res.trace
            dets[i, j] = res.determinant
    return StabilityChart(kappas, alphas, cls, traces, dets)


def kapitza_threshold(kappa: float, alpha_hi: float,
                      steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
                      tol: float = 1e-6) -> float:
    """Critical drive amplitude where the inverted pendulum stabilizes.

    Bisects |trace| - 2 between alpha = 0 (must be unstable) and alpha_hi
    (must be stable).  For small |kappa| the averaged dynamics predicts
    alpha_c ~ sqrt(2 |kappa|).
    """
    if kappa >= 0.0:
        raise ValueError("kappa must be negative")

    def excess(alpha: float) -> float:
        res = monodromy(PendulumParams(kappa, alpha), steps_per_period)
        return abs(res.trace) - 2.0

    if not (excess(0.0) > 0.0 and excess(alpha_hi) < 0.0):
        raise BracketError("bracket invalid")
    return bracket_root(excess, 0.0, alpha_hi, tol)
