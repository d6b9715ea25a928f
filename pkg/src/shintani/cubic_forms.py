"""Binary cubic forms a v^3 + b v^2 w + c v w^2 + d w^3.

Integral forms are plain tuples of Python ints so that every invariant is
computed exactly (Python ints never overflow).  Real forms are float arrays
of length 4.  The group acts on the right of the variables,
g.f(v, w) = f((v, w) g).
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Integral
from typing import NamedTuple, Sequence

import numpy as np


class CubicForm(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    def __str__(self) -> str:
        return format_form(self)


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c


def _is_int(x) -> bool:
    return isinstance(x, Integral) and not isinstance(x, bool)


def is_integral(f: Sequence) -> bool:
    return all(_is_int(x) for x in f)


def as_form(f: Sequence) -> CubicForm:
    """Coerce a 4-sequence of integers (including numpy ints) to a CubicForm."""
    if len(f) != 4:
        raise ValueError("a cubic form has four coefficients")
    if not is_integral(f):
        raise TypeError("integral form expected")
    return CubicForm(*(int(x) for x in f))


def parse_form(text: str) -> CubicForm:
    parts = text.replace(" ", "").split(",")
    if len(parts) != 4:
        raise ValueError(f"expected 'a,b,c,d', got {text!r}")
    return CubicForm(*(int(p) for p in parts))


def format_form(f: Sequence) -> str:
    return ",".join(str(int(x)) for x in f)


# --- invariants -------------------------------------------------------------

def discriminant(f: Sequence):
    """b^2 c^2 + 18abcd - 4ac^3 - 4b^3 d - 27a^2 d^2 (exact for integers)."""
    a, b, c, d = f
    if is_integral(f):
        a, b, c, d = int(a), int(b), int(c), int(d)
    return b * b * c * c + 18 * a * b * c * d - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d


def discriminant_array(F: np.ndarray) -> np.ndarray:
    """Vectorised discriminant over rows of an (N, 4) array (float or int64)."""
    F = np.asarray(F)
    a, b, c, d = F[..., 0], F[..., 1], F[..., 2], F[..., 3]
    return b * b * c * c + 18 * a * b * c * d - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d


def pairing(x: Sequence, y: Sequence):
    """<x, y> = x4 y1 - x3 y2 / 3 + x2 y3 / 3 - x1 y4.

    Exact Fraction when both arguments are integral, float otherwise.
    """
    if is_integral(x) and is_integral(y):
        x1, x2, x3, x4 = (int(v) for v in x)
        y1, y2, y3, y4 = (int(v) for v in y)
        return Fraction(3 * x4 * y1 - x3 * y2 + x2 * y3 - 3 * x1 * y4, 3)
    x1, x2, x3, x4 = (float(v) for v in x)
    y1, y2, y3, y4 = (float(v) for v in y)
    return x4 * y1 - x3 * y2 / 3.0 + x2 * y3 / 3.0 - x1 * y4


def hessian(f: Sequence) -> QuadForm:
    """Hessian covariant (b^2 - 3ac, bc - 9ad, c^2 - 3bd); disc(H) = -3 P(f)."""
    a, b, c, d = f
    return QuadForm(b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d)


def evaluate(f: Sequence, v, w):
    a, b, c, d = f
    return a * v ** 3 + b * v * v * w + c * v * w * w + d * w ** 3


# --- group action -----------------------------------------------------------

def _expand(f, p, q, r, s):
    # f(p v + q w, r v + s w) with (v, w) g = (p v + q w, r v + s w)
    a, b, c, d = f
    A = a * p ** 3 + b * p * p * r + c * p * r * r + d * r ** 3
    B = (3 * a * p * p * q + b * (p * p * s + 2 * p * q * r)
         + c * (2 * p * r * s + q * r * r) + 3 * d * r * r * s)
    C = (3 * a * p * q * q + b * (2 * p * q * s + q * q * r)
         + c * (p * s * s + 2 * q * r * s) + 3 * d * r * s * s)
    D = a * q ** 3 + b * q * q * s + c * q * s * s + d * s ** 3
    return A, B, C, D


def act(g, f: Sequence):
    """Coefficients of f((v, w) g).

    Integer matrix with integral form gives an exact CubicForm; anything else
    returns a float array.
    """
    g = [[g[0][0], g[0][1]], [g[1][0], g[1][1]]]
    entries = [g[0][0], g[0][1], g[1][0], g[1][1]]
    # (v, w) g = (g11 v + g21 w, g12 v + g22 w)
    p, q, r, s = g[0][0], g[1][0], g[0][1], g[1][1]
    if is_integral(entries) and is_integral(f):
        return CubicForm(*_expand([int(x) for x in f], int(p), int(q), int(r), int(s)))
    return np.array(_expand([float(x) for x in f], float(p), float(q), float(r), float(s)))


def act_array(g, F: np.ndarray) -> np.ndarray:
    """Apply one 2x2 matrix to every row of an (N, 4) array."""
    F = np.asarray(F)
    g = np.asarray(g)
    p, q, r, s = g[0, 0], g[1, 0], g[0, 1], g[1, 1]
    cols = _expand((F[..., 0], F[..., 1], F[..., 2], F[..., 3]), p, q, r, s)
    return np.stack(cols, axis=-1)


def act_quadratic(g, q: Sequence):
    """q((v, w) g) for a binary quadratic form (a, b, c)."""
    a, b, c = q
    p, qq, r, s = g[0][0], g[1][0], g[0][1], g[1][1]
    A = a * p * p + b * p * r + c * r * r
    B = 2 * a * p * qq + b * (p * s + qq * r) + 2 * c * r * s
    C = a * qq * qq + b * qq * s + c * s * s
    if is_integral([A, B, C]):
        return QuadForm(int(A), int(B), int(C))
    return np.array([A, B, C], dtype=float)


def mat_mul(g, h):
    return ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
            (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))


IDENTITY = ((1, 0), (0, 1))
S_MAT = ((0, -1), (1, 0))
T_MAT = ((1, 0), (1, 1))  # v -> v + w
T_INV = ((1, 0), (-1, 1))
MINUS_I = ((-1, 0), (0, -1))


# --- structural predicates ------------------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def rational_roots(f: Sequence) -> list[Fraction]:
    """Rational roots of f(v, 1), by the rational root test.  Requires a != 0."""
    a, b, c, d = as_form(f)
    if a == 0:
        raise ValueError("leading coefficient is zero")
    roots = set()
    if d == 0:
        roots.add(Fraction(0))
        # remaining quadratic a v^2 + b v + c
        disc = b * b - 4 * a * c
        if disc >= 0:
            r = math.isqrt(disc)
            if r * r == disc:
                roots.add(Fraction(-b + r, 2 * a))
                roots.add(Fraction(-b - r, 2 * a))
        return sorted(roots)
    for q in _divisors(a):
        for p in _divisors(d):
            for sp in (p, -p):
                if evaluate((a, b, c, d), sp, q) == 0:
                    roots.add(Fraction(sp, q))
    return sorted(roots)


def is_irreducible(f: Sequence) -> bool:
    """True iff f has no linear factor over Q (so a != 0 and no rational root)."""
    f = as_form(f)
    if discriminant(f) == 0:
        raise ValueError("singular form")
    if f.a == 0:
        return False
    return not rational_roots(f)


def is_dual_integral(f: Sequence) -> bool:
    return f[1] % 3 == 0 and f[2] % 3 == 0


# --- real base points and group elements ----------------------------------

_C108 = 108.0 ** 0.25


def base_point(sign: int) -> np.ndarray:
    """x_+ (disc 1, stabiliser of order 3) or x_- (disc -1)."""
    if sign > 0:
        return np.array([0.0, 3.0 / _C108, 0.0, -1.0 / _C108])
    if sign < 0:
        r = 1.0 / math.sqrt(2.0)
        return np.array([0.0, r, 0.0, r])
    raise ValueError("sign must be +1 or -1")


def d_mat(lam: float) -> np.ndarray:
    return np.array([[lam, 0.0], [0.0, lam]])


def n_mat(u: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [u, 1.0]])


def a_mat(t: float) -> np.ndarray:
    return np.array([[t, 0.0], [0.0, 1.0 / t]])


def k_mat(theta: float) -> np.ndarray:
    c, s = math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta)
    return np.array([[c, s], [-s, c]])


def compose_dnak(lam, u, t, theta) -> np.ndarray:
    """d_lam n_u a_t k_theta."""
    return d_mat(lam) @ n_mat(u) @ a_mat(t) @ k_mat(theta)


def compose_dkan(lam, theta, t, u) -> np.ndarray:
    """d_lam k_theta a_t n_u."""
    return d_mat(lam) @ k_mat(theta) @ a_mat(t) @ n_mat(u)


def decompose_dnak(g) -> tuple[float, float, float, float]:
    """(lam, u, t, theta) with g = d_lam n_u a_t k_theta; det g > 0."""
    g = np.asarray(g, dtype=float)
    det = np.linalg.det(g)
    if det <= 0:
        raise ValueError("determinant must be positive")
    lam = math.sqrt(det)
    h = g / lam
    # first row of n_u a_t k_theta is t (cos, sin)
    t = math.hypot(h[0, 0], h[0, 1])
    theta = (math.atan2(h[0, 1], h[0, 0]) / (2 * math.pi)) % 1.0
    L = h @ k_mat(theta).T
    u = L[1, 0] / t
    return lam, u, t, theta


def decompose_dkan(g) -> tuple[float, float, float, float]:
    """(lam, theta, t, u) with g = d_lam k_theta a_t n_u; det g > 0."""
    g = np.asarray(g, dtype=float)
    det = np.linalg.det(g)
    if det <= 0:
        raise ValueError("determinant must be positive")
    lam = math.sqrt(det)
    h = g / lam
    # second column of k_theta a_t n_u is (sin, cos) / t
    t = 1.0 / math.hypot(h[0, 1], h[1, 1])
    theta = (math.atan2(h[0, 1], h[1, 1]) / (2 * math.pi)) % 1.0
    L = k_mat(theta).T @ h
    u = L[1, 0] * t
    return lam, theta, t, u
