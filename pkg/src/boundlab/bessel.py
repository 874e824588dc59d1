"""Double-precision cylinder functions J0, J1, I0, K0 and zeros of J0/J1.

Self-contained kernel, no library special functions.  Branch layout:

* J0/J1: ascending power series for x <= 10.5, Hankel amplitude-phase
  asymptotics beyond x = 11.5 (DLMF 10.17), cosine-blended in between so
  the branch switch stays smooth (a hard switch leaves a ~1e-11 step that
  finite differences would amplify).  The asymptotic coefficients are the
  exact products a_k(nu) = prod_{j<=k} (4 nu^2 - (2j-1)^2) / (k! 8^k),
  generated at import; truncation at k = 21 keeps the omitted term below
  1e-10 absolute down to x = 10.5.
* I0: ascending series everywhere (all terms positive, no cancellation).
* K0: logarithmic series for x <= 2, fixed Gauss-Legendre quadrature of
  integral(exp(-x cosh t), t = 0..infinity) for 2 < x < 11, exponential
  asymptotics beyond.  The raw asymptotic series bottoms out near 1e-2
  at x = 2, far short of the accuracy target, hence the quadrature band.

Accuracy (checked against 40-digit reference values): relative error below
2e-11 away from zeros of J, below 1e-10 relative for I0/K0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import bracket_root
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

_SERIES_ASYM_SPLIT = 11.0
_K0_SERIES_SPLIT = 2.0
_ZERO_SCAN_STEP = 0.1


def _hankel_coefficients(nu: int, kmax: int) -> np.ndarray:
    a = np.empty(kmax + 1)
    a[0] = 1.0
    mu = 4.0 * nu * nu
    for k in range(1, kmax + 1):
        a[k] = a[k - 1] * (mu - (2 * k - 1) ** 2) / (k * 8.0)
    return a

_HANKEL_A = {0: _hankel_coefficients(0, 21), 1: _hankel_coefficients(1, 21)}

# K0 asymptotic: c_k = prod_{j<=k} (2j-1)^2 / (8 j); signs alternate in 1/x.
_K0_ASYM_C = np.empty(19)
_K0_ASYM_C[0] = 1.0
for _k in range(1, 19):
    _K0_ASYM_C[_k] = _K0_ASYM_C[_k - 1] * (2 * _k - 1) ** 2 / (8.0 * _k)

# Gauss-Legendre panels for integral(exp(-x cosh t), 0..4): exact to machine
# precision for x >= 2 (tail beyond t=4 is below exp(-54) relative).
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_K0_T = np.concatenate(
    [0.5 * (a + b) + 0.5 * (b - a) * _GL_NODES
     for a, b in zip(np.linspace(0.0, 4.0, 21)[:-1], np.linspace(0.0, 4.0, 21)[1:])]
)
_K0_W = np.tile(0.5 * (4.0 / 20.0) * _GL_WEIGHTS, 20)
_K0_COSH_T = np.cosh(_K0_T)


def _j_series(m: int, x: np.ndarray) -> np.ndarray:
    x2 = 0.25 * x * x
    term = np.ones_like(x) if m == 0 else 0.5 * x
    out = term.copy()
    for k in range(1, 42):
        term = -term * x2 / (k * (k + m))
        out += term
    return out


def _j_asym(m: int, x: np.ndarray) -> np.ndarray:
    a = _HANKEL_A[m]
    inv2 = 1.0 / (x * x)
    P = np.zeros_like(x)
    Q = np.zeros_like(x)
    for k in range(20, -1, -2):
        P = P * inv2 + ((-1.0) ** (k // 2)) * a[k]
    for k in range(21, 0, -2):
        Q = Q * inv2 + ((-1.0) ** ((k - 1) // 2)) * a[k]
    Q /= x
    chi = x - (2 * m + 1) * np.pi / 4.0
    return np.sqrt(2.0 / (np.pi * x)) * (P * np.cos(chi) - Q * np.sin(chi))


def _wrap(x, worker):
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    out = worker(np.atleast_1d(arr))
    return float(out[0]) if scalar else out


def bessel_j(m: int, x):
    """J0 or J1; domain 0 <= x <= 1e4."""
    if m not in (0, 1):
        raise ValueError("order must be 0 or 1")
    blend_lo = _SERIES_ASYM_SPLIT - 0.5
    blend_hi = _SERIES_ASYM_SPLIT + 0.5

    def worker(v):
        if v.size and (v.min() < 0.0 or v.max() > 1e4):
            raise DomainError("bessel_j argument outside [0, 1e4]")
        out = np.empty_like(v)
        lo = v <= blend_lo
        hi = v >= blend_hi
        mid = ~(lo | hi)
        if np.any(lo):
            out[lo] = _j_series(m, v[lo])
        if np.any(hi):
            out[hi] = _j_asym(m, v[hi])
        if np.any(mid):
            w = 0.5 * (1.0 + np.cos(np.pi * (v[mid] - blend_lo)))
            out[mid] = w * _j_series(m, v[mid]) + (1.0 - w) * _j_asym(m, v[mid])
        return out

    return _wrap(x, worker)


def bessel_i0(x):
    """Modified Bessel I0; domain 0 <= x <= 700 (overflow guard)."""

    def worker(v):
        if v.size and v.min() < 0.0:
            raise DomainError("bessel_i0 argument must be >= 0")
        if v.size and v.max() > 700.0:
            raise DomainError("bessel_i0 argument above overflow guard 700")
        return _i0_series(v)

    return _wrap(x, worker)


def _i0_series(v: np.ndarray) -> np.ndarray:
    x2 = 0.25 * v * v
    term = np.ones_like(v)
    out = term.copy()
    for k in range(1, 500):
        term = term * x2 / (k * k)
        out += term
        if np.max(term / out) < 1e-17:
            break
    return out


def _k0_series(v: np.ndarray) -> np.ndarray:
    x2 = 0.25 * v * v
    term = np.ones_like(v)
    i0 = term.copy()
    hsum = np.zeros_like(v)
    hk = 0.0
    for k in range(1, 18):
        term = term * x2 / (k * k)
        hk += 1.0 / k
        i0 += term
        hsum += term * hk
    return -(np.log(0.5 * v) + EULER_GAMMA) * i0 + hsum


def _k0_quad(v: np.ndarray) -> np.ndarray:
    return np.exp(-np.outer(v, _K0_COSH_T)) @ _K0_W


def _k0_asym(v: np.ndarray) -> np.ndarray:
    inv = 1.0 / v
    s = np.zeros_like(v)
    for k in range(18, -1, -1):
        s = s * inv + ((-1.0) ** k) * _K0_ASYM_C[k]
    return np.exp(-v) * np.sqrt(np.pi / (2.0 * v)) * s


def bessel_k0(x):
    """Modified Bessel K0; domain x > 0.

    Near the origin K0(x) = -ln(x/2) - gamma + O(x^2 ln x).
    """

    def worker(v):
        if v.size and v.min() <= 0.0:
            raise DomainError("bessel_k0 argument must be > 0")
        out = np.empty_like(v)
        lo = v <= _K0_SERIES_SPLIT
        mid = (v > _K0_SERIES_SPLIT) & (v < _SERIES_ASYM_SPLIT)
        hi = v >= _SERIES_ASYM_SPLIT
        if np.any(lo):
            out[lo] = _k0_series(v[lo])
        if np.any(mid):
            out[mid] = _k0_quad(v[mid])
        if np.any(hi):
            out[hi] = _k0_asym(v[hi])
        return out

    return _wrap(x, worker)


@dataclass(frozen=True)
class BesselZeroTable:
    """Ascending positive zeros j_{m,n}, n = 1..n_max, of J_m."""

    order: int
    zeros: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=float)
        object.__setattr__(self, "zeros", z)
        gaps = np.diff(z)
        if z.size > 1 and not (np.all(gaps > 2.9) and np.all(gaps < 3.3)):
            raise ValueError("zero table gaps outside (2.9, 3.3)")
        if np.any(np.diff(z) <= 0):
            raise ValueError("zero table not strictly increasing")

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.zeros)


def bessel_zeros(m: int, n_max: int) -> BesselZeroTable:
    """First n_max positive zeros, bracketed on a 0.1 scan and bisected.

    The scan step cannot skip a zero: consecutive zeros of J0/J1 are
    separated by more than 2.9.
    """
    if n_max < 1 or n_max > 1000:
        raise ValueError("n_max must be in 1..1000")
    f = lambda t: bessel_j(m, t)
    zeros = []
    x = _ZERO_SCAN_STEP
    fx = f(x)
    while len(zeros) < n_max:
        x2 = x + _ZERO_SCAN_STEP
        fx2 = f(x2)
        if fx == 0.0:
            zeros.append(x)
        elif (fx > 0) != (fx2 > 0):
            zeros.append(bracket_root(f, x, x2, 1e-11))
        x, fx = x2, fx2
    return BesselZeroTable(m, np.array(zeros[:n_max]))
