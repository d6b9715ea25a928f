"""Real analytic Eisenstein series on the modular surface.

With z = i gamma, tau = u + i y and t = sqrt(y):

E(z, tau) = t^(1+z) + xi(z)/xi(1+z) t^(1-z)
            + 4t/xi(1+z) sum_{m>=1} eta_{z/2}(m) K_{z/2}(2 pi m y) cos(2 pi m u).

Tail bound: |eta(m)| <= d(m) <= 2 sqrt(m) and |K_{i nu}(x)| <= K_0(x) <= sqrt(pi/2x) e^-x
give tail(M) <= 4/|xi(1+z)| e^{-2 pi (M+1) y} / (1 - e^{-2 pi y}).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .specfun import bessel_k_array, divisor_eta_table, xi

TABLE_XMIN = 0.05
TABLE_XMAX = 80.0
TABLE_POINTS = 4096


@dataclass(frozen=True)
class EisensteinParams:
    gamma: float
    truncation_tol: float = 1e-10

    def __post_init__(self):
        if self.gamma == 0:
            raise ValueError("gamma must be nonzero")
        if not self.truncation_tol > 0:
            raise ValueError("truncation_tol must be positive")

    @property
    def r(self) -> float:
        """Laplace eigenvalue (1 + gamma^2)/4."""
        return (1.0 + self.gamma ** 2) / 4.0


@dataclass(frozen=True)
class EisensteinValue:
    value: complex
    terms_used: int
    tail_bound: float


class _KTable:
    """Cubic spline of g(x) = K_{i gamma/2}(x) e^x sqrt(x) in log x.

    max_error is the largest observed deviation at interval midpoints,
    doubled; it bounds |K_spline - K| <= max_error e^-x / sqrt(x).
    """

    def __init__(self, gamma: float):
        nu = 0.5j * gamma
        s = np.linspace(math.log(TABLE_XMIN), math.log(TABLE_XMAX), TABLE_POINTS)
        x = np.exp(s)
        g = bessel_k_array(nu, x).real * np.exp(x) * np.sqrt(x)
        self.spline = CubicSpline(s, g)
        mid = 0.5 * (s[1:] + s[:-1])
        xm = np.exp(mid)
        exact = bessel_k_array(nu, xm).real * np.exp(xm) * np.sqrt(xm)
        self.max_error = 2.0 * float(np.max(np.abs(self.spline(mid) - exact))) + 1e-16

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.spline(np.log(x)) * np.exp(-x) / np.sqrt(x)


_tables: dict[float, _KTable] = {}
_tables_lock = threading.Lock()


def k_table(gamma: float) -> _KTable:
    key = abs(float(gamma))  # K_{i nu} is even in nu
    with _tables_lock:
        tab = _tables.get(key)
        if tab is None:
            tab = _KTable(key)
            _tables[key] = tab
    return tab


def tail_bound(gamma: float, y, M, xi1_abs: float | None = None):
    if xi1_abs is None:
        xi1_abs = abs(xi(1 + 1j * gamma).value)
    y = np.asarray(y, dtype=float)
    return 4.0 / xi1_abs * np.exp(-2 * math.pi * (np.asarray(M) + 1) * y) / (-np.expm1(-2 * math.pi * y))


def terms_needed(gamma: float, y, tol: float, xi1_abs: float | None = None):
    """Smallest M >= 0 with tail_bound(M) <= tol, elementwise."""
    if xi1_abs is None:
        xi1_abs = abs(xi(1 + 1j * gamma).value)
    y = np.asarray(y, dtype=float)
    # 4/|xi| e^{-2 pi (M+1) y} / (1 - e^{-2 pi y}) <= tol
    need = (np.log(4.0 / (xi1_abs * tol)) - np.log(-np.expm1(-2 * math.pi * y))) / (2 * math.pi * y) - 1
    return np.maximum(np.ceil(need), 0).astype(np.int64)


class EisensteinSeries:
    """E(i gamma, .) with cached constants and an optional K table."""

    def __init__(self, gamma: float, truncation_tol: float = 1e-10, use_table: bool = True):
        self.params = EisensteinParams(float(gamma), float(truncation_tol))
        self.gamma = float(gamma)
        self.z = 1j * self.gamma
        self.xi1 = xi(1 + self.z).value
        self.ratio = xi(self.z).value / self.xi1
        self.xi1_abs = abs(self.xi1)
        self.use_table = use_table
        self._eta = divisor_eta_table(self.z, 16)

    def _eta_upto(self, M: int) -> np.ndarray:
        if M >= len(self._eta):
            self._eta = divisor_eta_table(self.z, max(M, 2 * len(self._eta)))
        return self._eta[: M + 1]

    def constant_term(self, y):
        t = np.sqrt(np.asarray(y, dtype=float))
        return t ** (1 + self.z) + self.ratio * t ** (1 - self.z)

    def eval_array(self, tau, M=None):
        """Values, terms used and tail bounds at an array of points.

        Points where the interpolation error would push the bound past
        truncation_tol are recomputed with direct Bessel values.
        """
        tau = np.atleast_1d(np.asarray(tau, dtype=complex))
        y = tau.imag
        if np.any(y <= 0):
            raise ValueError("points must lie in the upper half-plane")
        tol = self.params.truncation_tol
        if M is None:
            Ms = terms_needed(self.gamma, y, tol, self.xi1_abs)
        else:
            Ms = np.full(y.shape, int(M), dtype=np.int64)
        val, tail = self._sum(tau, Ms, self.use_table)
        redo = (tail > tol) & self.use_table
        if M is None and redo.any():
            val[redo], tail[redo] = self._sum(tau[redo], Ms[redo], False)
        return val, Ms, tail

    def _sum(self, tau, Ms, use_table):
        u, y = tau.real, tau.imag
        Mmax = int(Ms.max()) if Ms.size else 0
        eta = self._eta_upto(Mmax)
        t = np.sqrt(y)
        val = self.constant_term(y).astype(complex)
        tail = tail_bound(self.gamma, y, Ms, self.xi1_abs)
        interp_err = np.zeros_like(y)
        if Mmax > 0:
            tab = k_table(self.gamma) if use_table else None
            acc = np.zeros(y.shape, dtype=complex)
            for m in range(1, Mmax + 1):
                act = Ms >= m
                if not act.any():
                    break
                x = 2 * math.pi * m * y[act]
                if tab is not None and x.min() >= TABLE_XMIN and x.max() <= TABLE_XMAX:
                    k = tab(x)
                    interp_err[act] += 2 * math.sqrt(m) * tab.max_error * np.exp(-x) / np.sqrt(x)
                else:
                    k = bessel_k_array(0.5 * self.z, x).real
                acc[act] += eta[m] * k * np.cos(2 * math.pi * m * u[act])
            val += 4 * t / self.xi1 * acc
            tail = tail + 4 * t / self.xi1_abs * interp_err
        return val, tail

    def __call__(self, tau) -> EisensteinValue:
        v, M, tb = self.eval_array(np.array([complex(tau)]))
        return EisensteinValue(complex(v[0]), int(M[0]), float(tb[0]))


def eval_E(params: EisensteinParams, tau, use_table: bool = True) -> EisensteinValue:
    """E(i gamma, tau) with the number of Fourier terms set by truncation_tol."""
    return EisensteinSeries(params.gamma, params.truncation_tol, use_table)(tau)


def functional_equation_defect(gamma: float, tau, tol: float = 1e-12) -> float:
    """|xi(1 + i gamma) E(i gamma, tau) - xi(1 - i gamma) E(-i gamma, tau)|."""
    z = 1j * gamma
    Ep = EisensteinSeries(gamma, tol, use_table=False)(tau).value
    Em = EisensteinSeries(-gamma, tol, use_table=False)(tau).value
    return abs(xi(1 + z).value * Ep - xi(1 - z).value * Em)


def laplacian_defect(gamma: float, tau, h: float = 1e-3, tol: float = 1e-14) -> float:
    """| -y^2 (E_xx + E_yy) - (1 + gamma^2)/4 E | / |E| by the 5-point stencil.

    The number of Fourier terms is held fixed across the stencil; each
    Fourier mode is itself an eigenfunction, so truncation does not bias it.
    """
    if h > 1e-3:
        raise ValueError("step must be <= 1e-3")
    tau = complex(tau)
    y = tau.imag
    if y - h <= 0:
        raise ValueError("stencil leaves the upper half-plane")
    E = EisensteinSeries(gamma, tol, use_table=False)
    M = int(terms_needed(gamma, y - h, tol, E.xi1_abs))
    pts = np.array([tau, tau + h, tau - h, tau + 1j * h, tau - 1j * h])
    v, _, _ = E.eval_array(pts, M=M)
    lap = (v[1] + v[2] + v[3] + v[4] - 4 * v[0]) / (h * h)
    lam = (1 + gamma ** 2) / 4
    return float(abs(-y * y * lap - lam * v[0]) / abs(v[0]))
