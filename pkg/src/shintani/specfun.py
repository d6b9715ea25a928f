"""Gamma, zeta, xi, K-Bessel of real or imaginary order, divisor sums and the
Mellin transform of the fixed bump weight.

Every evaluator returns a SpecFunResult carrying an absolute error bound.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SpecFunResult:
    value: complex
    abs_error_bound: float

    def __complex__(self):
        return complex(self.value)


def _is_pole(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and float(z.real).is_integer()


# --- Gamma -------------------------------------------------------------

def gamma(z) -> SpecFunResult:
    """Complex Gamma function (scipy's loggamma, exponentiated)."""
    z = complex(z)
    if _is_pole(z):
        raise ValueError(f"Gamma has a pole at {z}")
    lg = special.loggamma(z)
    val = cmath.exp(lg)
    if z.imag == 0:
        val = complex(special.gamma(z.real), 0.0)
    # relative error of exp(loggamma) grows with |loggamma|
    rel = 8 * EPS * (1.0 + abs(lg))
    return SpecFunResult(val, rel * abs(val))


def gamma_value(z) -> complex:
    return gamma(z).value


# --- Riemann zeta by Euler-Maclaurin -----------------------------------

@lru_cache(maxsize=None)
def _bernoulli_even(K: int) -> tuple:
    B = special.bernoulli(2 * K)
    return tuple(float(B[2 * k]) for k in range(1, K + 1))


def zeta(s) -> SpecFunResult:
    """Riemann zeta via Euler-Maclaurin summation; any s != 1.

    Re s < 1/2 goes through the functional equation
    zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s).
    """
    s = complex(s)
    if s == 1:
        raise ValueError("zeta has a pole at s = 1")
    if s.real < 0.5:
        return _zeta_reflected(s)
    return _zeta_em(s)


def _zeta_reflected(s: complex) -> SpecFunResult:
    if abs(s) < 1e-8:
        # zeta(s) = -1/2 - s log(2 pi)/2 + O(s^2)
        return SpecFunResult(-0.5 - 0.5 * s * math.log(2 * math.pi), EPS + abs(s) ** 2)
    if s.imag == 0 and s.real < 0 and float(s.real / 2).is_integer():
        return SpecFunResult(0j, 0.0)  # trivial zeros
    r = _zeta_em(1 - s)
    lg = special.loggamma(1 - s)
    logfac = s * math.log(2) + (s - 1) * math.log(math.pi) + lg
    val = cmath.exp(logfac) * cmath.sin(math.pi * s / 2) * r.value
    rel = r.abs_error_bound / abs(r.value) + 8 * EPS * (4 + abs(logfac) + abs(s))
    return SpecFunResult(val, rel * abs(val))


def _zeta_em(s: complex) -> SpecFunResult:
    K = 30
    N = int(max(30, abs(s) / 2 + 30))
    n = np.arange(1, N, dtype=float)
    head_terms = np.exp(-s * np.log(n))
    head = complex(math.fsum(head_terms.real), math.fsum(head_terms.imag))
    total = head + N ** (1 - s) / (s - 1) + 0.5 * N ** (-s)
    B = _bernoulli_even(K + 1)
    poch = s  # s (s+1) ... (s + 2k - 2)
    fact = 2.0  # (2k)!
    term = 0j
    mag = abs(total)
    for k in range(1, K + 2):
        term = B[k - 1] / fact * poch * N ** (-s - 2 * k + 1)
        if k <= K:
            total += term
            mag = max(mag, abs(term))
            poch *= (s + 2 * k - 1) * (s + 2 * k)
            fact *= (2 * k + 1) * (2 * k + 2)
    sigma = s.real
    # remainder after K correction terms is bounded by the next one, scaled
    rem = abs(term) * abs(s + 2 * K + 1) / max(sigma + 2 * K + 1, 1e-3)
    err = rem + 16 * EPS * (N * np.max(np.abs(head_terms)) + mag)
    return SpecFunResult(total, float(err))


def xi(z) -> SpecFunResult:
    """Completed zeta pi^{-z/2} Gamma(z/2) zeta(z)."""
    z = complex(z)
    if z == 0 or z == 1:
        raise ValueError("xi factors have poles at 0 and 1")
    g = gamma(z / 2)
    zt = zeta(z)
    p = cmath.exp(-z / 2 * math.log(math.pi))
    val = p * g.value * zt.value
    err = abs(p) * (abs(g.value) * zt.abs_error_bound + abs(zt.value) * g.abs_error_bound)
    err += 4 * EPS * abs(val)
    return SpecFunResult(val, err)


def xi_ratio(gamma_: float) -> complex:
    """xi(i gamma) / xi(1 + i gamma)."""
    z = 1j * gamma_
    return xi(z).value / xi(1 + z).value


# --- K-Bessel ------------------------------------------------------------

def _bessel_nodes(nu: complex, xmin: float, target: float = 40.0):
    # truncation point T with x cosh T - |Re nu| T >= target + log stuff
    rn = abs(nu.real)
    T = 1.0
    for _ in range(60):
        T_new = math.acosh(max((target + rn * T + 5.0) / xmin, 1.0))
        if abs(T_new - T) < 1e-12:
            break
        T = T_new
    T = max(T, 1.0)
    d = 1.2  # strip half-width used for the trapezoid error estimate
    h = 2 * math.pi * d / (abs(nu.imag) * d + rn + target + 50.0)
    h = min(h, 0.1)
    n = int(math.ceil(T / h))
    h = T / n
    return T, h, n


def _trapezoid_k(nu: complex, x: np.ndarray, h: float, n: int):
    t = np.arange(n + 1) * h
    w = np.full(n + 1, h)
    w[0] = 0.5 * h  # even integrand: trapezoid on [0, inf) is the half line rule
    if nu.imag == 0:
        c = np.cosh(nu.real * t)
    elif nu.real == 0:
        c = np.cos(nu.imag * t)
    else:
        c = np.cosh(nu * t)
    E = np.exp(-np.outer(x, np.cosh(t)))
    vals = E @ (w * c)
    absum = E @ (w * np.abs(c))
    return vals, absum


def bessel_k_array(nu, x, with_error: bool = False):
    """K_nu(x) for an array of x > 0 by trapezoid quadrature of
    int_0^inf exp(-x cosh t) cosh(nu t) dt.

    Real output for real or purely imaginary order.
    """
    nu = complex(nu)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    T, h, n = _bessel_nodes(nu, float(x.min()))
    out = np.empty(x.shape, dtype=complex if (nu.real != 0 and nu.imag != 0) else float)
    err = np.empty(x.shape)
    chunk = max(1, 4_000_000 // (n + 1))
    for i in range(0, x.size, chunk):
        xs = x[i:i + chunk]
        v, absum = _trapezoid_k(nu, xs, h, n)
        out[i:i + chunk] = v
        if with_error:
            v2, _ = _trapezoid_k(nu, xs, 2 * h, n // 2) if n % 2 == 0 else _trapezoid_k(nu, xs, 2 * T / (n + 1), (n + 1) // 2)
            tail = np.exp(-(xs * math.cosh(T) - abs(nu.real) * T)) / np.maximum(xs * math.sinh(T) - abs(nu.real), 1e-300)
            err[i:i + chunk] = np.abs(v - v2) + tail + 32 * EPS * absum
    if with_error:
        return out, err
    return out


def bessel_k(nu, x: float) -> SpecFunResult:
    """K_nu(x), real or imaginary order (complex order is accepted too)."""
    if x <= 0:
        raise ValueError("x must be positive")
    v, e = bessel_k_array(nu, np.array([float(x)]), with_error=True)
    return SpecFunResult(complex(v[0]), float(e[0]))


# --- divisor sums ---------------------------------------------------------

def divisors(m: int) -> list[int]:
    m = int(m)
    if m < 1:
        raise ValueError("m must be positive")
    small, large = [], []
    k = 1
    while k * k <= m:
        if m % k == 0:
            small.append(k)
            if k * k != m:
                large.append(m // k)
        k += 1
    return small + large[::-1]


def divisor_eta(z, m: int) -> complex:
    """eta_{z/2}(m) = sum over a b = m of (a / b)^{z/2}."""
    z = complex(z)
    total = 0j
    for a in divisors(m):
        total += cmath.exp(z / 2 * math.log(a / (m // a)))
    return total


def divisor_eta_table(z, M: int) -> np.ndarray:
    """eta_{z/2}(m) for m = 0..M (index 0 unused) via a divisor sieve."""
    z = complex(z)
    out = np.zeros(M + 1, dtype=complex)
    for a in range(1, M + 1):
        m = np.arange(a, M + 1, a)
        b = m // a
        out[m] += np.exp(z / 2 * (math.log(a) - np.log(b)))
    return out


# --- bump weight and its Mellin transform ------------------------------

def f_D(x):
    """exp(-1/((x-1)(2-x))) on (1, 2), zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 1) & (x < 2)
    xi_ = x[inside]
    out[inside] = np.exp(-1.0 / ((xi_ - 1.0) * (2.0 - xi_)))
    return out if out.ndim else float(out)


def _mellin_part(fn):
    val, err = integrate.quad(fn, 1.0, 2.0, epsabs=1e-15, epsrel=1e-14, limit=400)
    return val, err


@lru_cache(maxsize=4096)
def _mellin_fD_cached(sr: float, si: float):
    s1 = complex(sr, si) - 1

    def re(x):
        return math.exp(-1.0 / ((x - 1.0) * (2.0 - x)) + s1.real * math.log(x)) * math.cos(s1.imag * math.log(x)) if 1 < x < 2 else 0.0

    def im(x):
        return math.exp(-1.0 / ((x - 1.0) * (2.0 - x)) + s1.real * math.log(x)) * math.sin(s1.imag * math.log(x)) if 1 < x < 2 else 0.0

    vr, er = _mellin_part(re)
    vi, ei = (0.0, 0.0) if si == 0 else _mellin_part(im)
    return complex(vr, vi), er + ei


def mellin_fD(s) -> SpecFunResult:
    """int_1^2 f_D(x) x^{s-1} dx by adaptive quadrature."""
    s = complex(s)
    v, e = _mellin_fD_cached(s.real, s.imag)
    return SpecFunResult(v, max(e, 4 * EPS * abs(v)))


# --- the three Mellin identities ---------------------------------------

def _quad_complex(fn, a, b, **kw):
    re, er = integrate.quad(lambda x: fn(x).real, a, b, **kw)
    im, ei = integrate.quad(lambda x: fn(x).imag, a, b, **kw)
    return complex(re, im), er + ei


def mellin_bessel_lhs(nu, s) -> complex:
    """int_0^inf K_nu(x) x^{s-1} dx by quadrature of the evaluator above."""
    nu, s = complex(nu), complex(s)

    def fn(x):
        return complex(bessel_k_array(nu, np.array([x]))[0]) * cmath.exp((s - 1) * math.log(x))

    kw = dict(epsabs=1e-14, epsrel=1e-12, limit=400)
    a, _ = _quad_complex(fn, 0.0, 1.0, **kw)
    b, _ = _quad_complex(fn, 1.0, 60.0, **kw)
    return a + b


def mellin_bessel_rhs(nu, s) -> complex:
    nu, s = complex(nu), complex(s)
    return 2 ** (s - 2) * gamma_value((s + nu) / 2) * gamma_value((s - nu) / 2)


def mellin_gauss_lhs(s) -> complex:
    """int_0^inf exp(-t^2 - 1/t^2) t^{s-1} dt."""
    s = complex(s)

    def fn(t):
        return cmath.exp(-t * t - 1.0 / (t * t) + (s - 1) * math.log(t))

    kw = dict(epsabs=1e-15, epsrel=1e-13, limit=400)
    a, _ = _quad_complex(fn, 0.0, 1.0, **kw)
    b, _ = _quad_complex(fn, 1.0, np.inf, **kw)
    return a + b


def mellin_gauss_rhs(s) -> complex:
    return bessel_k(complex(s) / 2, 2.0).value


def mellin_cos_lhs(s) -> complex:
    """int_0^inf cos(x) x^{s-1} dx for 0 < Re s < 1 (conditionally convergent).

    The tail over [1, inf) uses QUADPACK's Fourier-integral routine, which
    sums cycle-length sections with epsilon-algorithm extrapolation.
    """
    s = complex(s)
    sig, tau = s.real, s.imag
    if not 0 < sig < 1:
        raise ValueError("cosine Mellin identity needs 0 < Re s < 1")

    def head(part):
        def g(x):
            if x <= 0.0:
                return 1.0 if part == 0 else 0.0
            ph = tau * math.log(x)
            return math.cos(x) * (math.cos(ph) if part == 0 else math.sin(ph))
        v, _ = integrate.quad(g, 0.0, 1.0, weight="alg", wvar=(sig - 1.0, 0.0),
                              epsabs=1e-14, epsrel=1e-12, limit=400)
        return v

    def tail(part):
        g = (lambda x: x ** (sig - 1.0) * math.cos(tau * math.log(x))) if part == 0 else \
            (lambda x: x ** (sig - 1.0) * math.sin(tau * math.log(x)))
        v, _ = integrate.quad(g, 1.0, np.inf, weight="cos", wvar=1.0, limlst=200, limit=400)
        return v

    re = head(0) + tail(0)
    im = 0.0 if tau == 0 else head(1) + tail(1)
    return complex(re, im)


def mellin_cos_rhs(s) -> complex:
    s = complex(s)
    return gamma_value(s) * cmath.cos(math.pi * s / 2)


def rel_err(lhs, rhs) -> float:
    den = max(abs(lhs), abs(rhs))
    return 0.0 if den == 0 else abs(lhs - rhs) / den


def check_mellin_identities(samples=None) -> list[dict]:
    """Evaluate both sides of the three Mellin identities at sample points.

    samples: dict with keys 'bessel' (list of (nu, s)), 'gauss' (list of s),
    'cos' (list of s); defaults cover each identity's validity region.
    """
    if samples is None:
        samples = {
            "bessel": [(0.0, 2.0), (0.5, 1.5), (0.5j, 1.25), (1j, 2.0 + 0.5j)],
            "gauss": [0.0, 1.0, 0.5 + 1j, -1.5],
            "cos": [0.5, 0.25, 0.75, 0.5 + 0.5j],
        }
    out = []
    for nu, s in samples.get("bessel", []):
        lhs, rhs = mellin_bessel_lhs(nu, s), mellin_bessel_rhs(nu, s)
        out.append(dict(identity="bessel", sample=[_cjson(nu), _cjson(s)], lhs=_cjson(lhs),
                        rhs=_cjson(rhs), rel_err=rel_err(lhs, rhs), tol=1e-8))
    for s in samples.get("gauss", []):
        lhs, rhs = mellin_gauss_lhs(s), mellin_gauss_rhs(s)
        out.append(dict(identity="gauss", sample=[_cjson(s)], lhs=_cjson(lhs),
                        rhs=_cjson(rhs), rel_err=rel_err(lhs, rhs), tol=1e-10))
    for s in samples.get("cos", []):
        lhs, rhs = mellin_cos_lhs(s), mellin_cos_rhs(s)
        out.append(dict(identity="cos", sample=[_cjson(s)], lhs=_cjson(lhs),
                        rhs=_cjson(rhs), rel_err=rel_err(lhs, rhs), tol=1e-6))
    return out


def _cjson(z):
    z = complex(z)
    return [z.real, z.imag]
