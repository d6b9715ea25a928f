"""Lattice shapes of cubic rings and the group element realising a real form.

Two points of the upper half-plane are attached to a nondegenerate form f:

* the lattice shape: the cubic ring <1, w, theta> of f embedded in R^3 or
  R x C, projected orthogonally to 1 and read off as a 2D lattice;
* the group point N_h(i), where f = d_lam h . x_sign and N_h = (h^-1)^T acts
  by Moebius transformations.  It is the complex root of f(v, 1) for
  negative discriminant and the root of the Hessian for positive.

Both are SL2(Z)-class invariants and both are equivariant:
lattice(h . x_sign) = N_h(tau0) with tau0 = i for x_+ and i sqrt(3) for
x_-.  For positive discriminant they coincide; for negative they differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cubic_forms import (
    act, act_array, base_point, compose_dnak, discriminant, discriminant_array,
    is_integral,
)

SQRT3 = math.sqrt(3.0)
RHO = complex(-0.5, SQRT3 / 2)
BOUNDARY_TOL = 1e-9

# lattice shape of the base points x_+ and x_-
BASE_SHAPE = {1: 1j, -1: 1j * SQRT3}
# cusp-barrier constants: t >= c0 |disc|^(-1/12) whenever |a| >= 1
CUSP_C0 = {1: 108.0 ** (1.0 / 12.0), -1: 2.0 ** (1.0 / 6.0)}


@dataclass(frozen=True)
class ShapePoint:
    x: float
    y: float

    @property
    def tau(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class IwasawaSolution:
    """g = d_lam n_u a_t k_theta with g . x_sign = x."""
    lam: float
    u: float
    t: float
    theta: float
    residual: float

    def matrix(self) -> np.ndarray:
        return compose_dnak(self.lam, self.u, self.t, self.theta)


# --- Moebius helpers ----------------------------------------------------------

def moebius(M, z):
    """(A z + B) / (C z + D) for M = [[A, B], [C, D]]."""
    (A, B), (C, D) = M
    return (A * z + B) / (C * z + D)


def root_map(g) -> np.ndarray:
    """N_g = (g^-1)^T det g: roots of f(v, 1) go to roots of (g.f)(v, 1)."""
    g = np.asarray(g, dtype=float)
    return np.array([[g[1, 1], -g[1, 0]], [-g[0, 1], g[0, 0]]])


# --- fundamental domain -------------------------------------------------------

def fundamental_domain_reduce(tau: complex, tol: float = BOUNDARY_TOL):
    """Reduce tau into |x| <= 1/2, |tau| >= 1.

    Returns (ShapePoint, M) with M an integer unimodular matrix such that
    moebius(M, tau) is the reduced point.  Boundary representatives are
    canonicalised to x = -1/2 on the vertical lines and x <= 0 on the arc.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError("point must lie in the upper half-plane")
    A, B, C, D = 1, 0, 0, 1
    for _ in range(10000):
        n = math.floor(tau.real + 0.5)
        if n:
            tau -= n
            A, B = A - n * C, B - n * D
        if abs(tau) ** 2 < 1.0 - tol:
            tau = -1.0 / tau
            A, B, C, D = -C, -D, A, B
            continue
        break
    else:
        raise RuntimeError("reduction did not terminate")
    if tau.real >= 0.5 - tol:
        tau -= 1.0
        A, B = A - C, B - D
    if abs(tau) ** 2 < 1.0 + tol and tau.real > tol:
        tau = -1.0 / tau
        A, B, C, D = -C, -D, A, B
    return ShapePoint(tau.real, tau.imag), ((A, B), (C, D))


def reduce_points(tau: np.ndarray, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Vectorised fundamental-domain reduction (no witness)."""
    tau = np.array(tau, dtype=complex, copy=True)
    if np.any(tau.imag <= 0):
        raise ValueError("points must lie in the upper half-plane")
    active = np.ones(tau.shape, dtype=bool)
    for _ in range(10000):
        if not active.any():
            break
        z = tau[active]
        z = z - np.floor(z.real + 0.5)
        inv = np.abs(z) ** 2 < 1.0 - tol
        z[inv] = -1.0 / z[inv]
        tau[active] = z
        idx = np.flatnonzero(active)
        active[idx[~inv]] = False
    else:
        raise RuntimeError("reduction did not terminate")
    right = tau.real >= 0.5 - tol
    tau[right] -= 1.0
    arc = (np.abs(tau) ** 2 < 1.0 + tol) & (tau.real > tol)
    tau[arc] = -1.0 / tau[arc]
    return tau


def same_point_mod_gamma(p: complex, q: complex, tol: float) -> bool:
    """Compare two reduced points allowing for the boundary identifications."""
    cands = [p, p + 1, p - 1, -1 / p, -1 / p + 1, -1 / p - 1]
    return min(abs(c - q) for c in cands) <= tol


# --- multiplication table -----------------------------------------------------

def ring_multiplication_table(f: Sequence) -> np.ndarray:
    """Structure constants M[i, j, k] of the cubic ring with basis (1, w, theta).

    e_i e_j = sum_k M[i, j, k] e_k with
    w theta = -ad, w^2 = -ac + b w - a theta, theta^2 = -bd + d w - c theta.
    """
    if discriminant(f) == 0:
        raise ValueError("singular form")
    a, b, c, d = f
    dtype = object if is_integral(f) else float
    M = np.zeros((3, 3, 3), dtype=dtype)
    for i in range(3):
        M[0, i, i] = 1
        M[i, 0, i] = 1
    M[1, 1] = [-a * c, b, -a]
    M[1, 2] = [-a * d, 0, 0]
    M[2, 1] = [-a * d, 0, 0]
    M[2, 2] = [-b * d, d, -c]
    if dtype is object:
        M = M.astype(object)
        for idx in np.ndindex(M.shape):
            M[idx] = int(M[idx])
    return M


def _mul(M, x, y):
    n = M.shape[0]
    out = [0] * n
    for i in range(n):
        for j in range(n):
            if x[i] == 0 or y[j] == 0:
                continue
            for k in range(n):
                out[k] += x[i] * y[j] * M[i, j, k]
    return out


def associativity_defect(M) -> int:
    """max |(e_i e_j) e_k - e_i (e_j e_k)| over basis triples."""
    n = M.shape[0]
    basis = [[1 if k == i else 0 for k in range(n)] for i in range(n)]
    worst = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = _mul(M, _mul(M, basis[i], basis[j]), basis[k])
                rhs = _mul(M, basis[i], _mul(M, basis[j], basis[k]))
                worst = max(worst, max(abs(p - q) for p, q in zip(lhs, rhs)))
    return worst


def trace_form(M) -> list:
    """Gram matrix Tr(e_i e_j) of the algebraic trace form."""
    n = M.shape[0]
    # trace of multiplication by e_k
    tr = [sum(M[k, j, j] for j in range(n)) for k in range(n)]
    return [[sum(M[i, j, k] * tr[k] for k in range(n)) for j in range(n)] for i in range(n)]


def trace_discriminant(M):
    G = trace_form(M)
    (a, b, c), (d, e, f), (g, h, i) = G
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


# --- roots --------------------------------------------------------------------

_GOOD_ROWS = ((0, 1), (1, 1), (1, -1), (2, 1), (1, 2))


def _lift_leading(F: np.ndarray) -> np.ndarray:
    """Transform rows with a = 0 by an integer unimodular map so that a != 0.

    Returns the stacked 2x2 matrices used (identity where a != 0).
    """
    n = F.shape[0]
    G = np.tile(np.eye(2), (n, 1, 1))
    todo = F[:, 0] == 0
    for p, r in _GOOD_ROWS:
        if not todo.any():
            break
        # matrix with first row (p, r); complete to det 1
        if p == 0:
            g = np.array([[0, 1], [-1, 0]], dtype=float)
        else:
            g = np.array([[p, r], [0, 1]] if p == 1 else [[p, r], [1, 1]], dtype=float)
        val = F[:, 0] * p ** 3 + F[:, 1] * p * p * r + F[:, 2] * p * r * r + F[:, 3] * r ** 3
        use = todo & (val != 0)
        G[use] = g
        todo &= ~use
    return G


def cubic_roots(F: np.ndarray) -> np.ndarray:
    """Roots of a v^3 + b v^2 + c v + d (rows, a != 0), Newton-polished.

    Each row is ordered (real root, complex root with Im > 0, its conjugate)
    for negative discriminant and ascending for positive.
    """
    F = np.asarray(F, dtype=float)
    a = F[:, 0]
    n = F.shape[0]
    comp = np.zeros((n, 3, 3))
    comp[:, 0, :] = -F[:, 1:] / a[:, None]
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    r = np.linalg.eigvals(comp).astype(complex)
    for _ in range(2):
        p = ((F[:, 0, None] * r + F[:, 1, None]) * r + F[:, 2, None]) * r + F[:, 3, None]
        dp = (3 * F[:, 0, None] * r + 2 * F[:, 1, None]) * r + F[:, 2, None]
        step = np.where(dp != 0, p / np.where(dp != 0, dp, 1), 0)
        r = r - step
    disc = discriminant_array(F)
    out = np.empty_like(r)
    neg = disc < 0
    if neg.any():
        rn = r[neg]
        k = np.argmin(np.abs(rn.imag), axis=1)
        real = rn[np.arange(len(rn)), k].real
        # complex pair from the deflated quadratic, more stable than eigvals
        A = F[neg, 0]
        B = F[neg, 1] + A * real
        C = F[neg, 2] + B * real
        sq = np.sqrt((4 * A * C - B * B).astype(complex))
        z = (-B + 1j * np.abs(sq)) / (2 * A)
        z = np.where(z.imag > 0, z, np.conj(z))
        out[neg] = np.stack([real + 0j, z, np.conj(z)], axis=1)
    pos = ~neg
    if pos.any():
        out[pos] = np.sort(r[pos].real, axis=1) + 0j
    return out


# --- lattice shape ------------------------------------------------------------

def lattice_tau(F: np.ndarray) -> np.ndarray:
    """Unreduced lattice shape of each row of F (any nonzero discriminant)."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    G = _lift_leading(F)
    H = F.copy()
    lifted = F[:, 0] == 0
    for i in np.flatnonzero(lifted):
        H[i] = act(G[i], F[i])
    roots = cubic_roots(H)
    a = H[:, 0, None]
    b = H[:, 1, None]
    w = a * roots
    th = a * roots * roots + b * roots
    # orthogonal projection against 1 for the standard Hermitian form
    w = w - w.mean(axis=1, keepdims=True)
    th = th - th.mean(axis=1, keepdims=True)
    g11 = np.sum(np.abs(w) ** 2, axis=1)
    g12 = np.sum((w * np.conj(th)).real, axis=1)
    # |det(sigma_i(e_j))|^2 = |disc| and the projection divides it by 3;
    # using it avoids cancellation in g11 g22 - g12^2 for skewed lattices
    det = np.abs(discriminant_array(F)) / 3.0
    tau = (-g12 + 1j * np.sqrt(det)) / g11
    # undo the lift: lattice(g.f) = N_g(lattice(f)) for unimodular g
    for i in np.flatnonzero(lifted):
        Ninv = root_map(np.linalg.inv(G[i]))
        tau[i] = moebius(Ninv, tau[i])
    return tau


def shape_points(F: np.ndarray) -> np.ndarray:
    """Reduced lattice shapes of all rows (complex array)."""
    return reduce_points(lattice_tau(F))


def shape_point(f: Sequence) -> ShapePoint:
    """Lattice shape of the cubic ring of f, reduced to the fundamental domain."""
    if discriminant(f) == 0:
        raise ValueError("singular form")
    tau = lattice_tau(np.array([f], dtype=float))[0]
    if not (np.isfinite(tau) and tau.imag > 0):
        raise ArithmeticError(f"root finding failed for {tuple(f)}")
    return fundamental_domain_reduce(tau)[0]


# --- group point --------------------------------------------------------------

def covariant_tau(F: np.ndarray) -> np.ndarray:
    """N_h(i) for f = d_lam h . x_sign: complex root (disc < 0), Hessian root (disc > 0)."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    a, b, c, d = F.T
    disc = discriminant_array(F)
    tau = np.empty(F.shape[0], dtype=complex)
    pos = disc > 0
    P = b * b - 3 * a * c
    Q = b * c - 9 * a * d
    R = c * c - 3 * b * d
    sq = np.sqrt(np.maximum(4 * P * R - Q * Q, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        tau[pos] = (-Q[pos] + 1j * sq[pos]) / (2 * P[pos])
    neg = ~pos
    if neg.any():
        Fn = F[neg]
        out = np.empty(Fn.shape[0], dtype=complex)
        # small leading coefficient: take the root of the reversed cubic and invert
        rev = np.abs(Fn[:, 0]) < np.abs(Fn[:, 3])
        if (~rev).any():
            out[~rev] = cubic_roots(Fn[~rev])[:, 1]
        if rev.any():
            out[rev] = 1.0 / np.conj(cubic_roots(Fn[rev][:, ::-1])[:, 1])
        tau[neg] = out
    return tau


def group_points(F: np.ndarray) -> np.ndarray:
    """Reduced group points N_h(i) of all rows (complex array)."""
    return reduce_points(covariant_tau(F))


def group_point(f: Sequence) -> ShapePoint:
    if discriminant(f) == 0:
        raise ValueError("singular form")
    return fundamental_domain_reduce(covariant_tau(np.array([f], dtype=float))[0])[0]


# --- solving g . x_sign = x -----------------------------------------------------

def _coeff_residual(p, x0, x):
    return act(compose_dnak(*p), x0) - x


def solve_group_element(x: Sequence, sign: int, max_iter: int = 30,
                        tol: float = 1e-10) -> IwasawaSolution:
    """Find (lam, u, t, theta) with d_lam n_u a_t k_theta . x_sign = x.

    Closed-form start (lam from the discriminant, u and t from the covariant
    point, theta from the leading and trailing coefficients of the rotated
    form) followed by Newton on the four coefficient equations.
    """
    x = np.asarray(x, dtype=float)
    P = discriminant(x)
    if P == 0 or (P > 0) != (sign > 0):
        raise ValueError("discriminant sign does not match")
    x0 = base_point(sign)
    lam = abs(P) ** (1.0 / 12.0)
    beta = covariant_tau(x[None, :])[0]
    u = -beta.real
    t = beta.imag ** -0.5
    na = compose_dnak(lam, u, t, 0.0)
    y = act(np.linalg.inv(na), x)
    if sign < 0:
        theta = (math.atan2(y[0], y[3]) / (2 * math.pi)) % 1.0
    else:
        theta = (math.atan2(y[0], -y[3]) / (6 * math.pi)) % (1.0 / 3.0)
    p = np.array([lam, u, t, theta])
    res = _coeff_residual(p, x0, x)
    best = (np.max(np.abs(res)), p.copy())
    for _ in range(max_iter):
        if best[0] <= tol * 1e-3:
            break
        J = np.empty((4, 4))
        for j in range(4):
            h = 1e-7 * max(1.0, abs(p[j]))
            e = np.zeros(4)
            e[j] = h
            J[:, j] = (_coeff_residual(p + e, x0, x) - _coeff_residual(p - e, x0, x)) / (2 * h)
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            break
        p = p + step
        res = _coeff_residual(p, x0, x)
        r = np.max(np.abs(res))
        if r < best[0]:
            best = (r, p.copy())
        elif r > 10 * best[0]:
            break
    resid, p = best
    lam, u, t, theta = p
    period = 1.0 / 3.0 if sign > 0 else 1.0
    theta = theta % period
    if theta >= period - 1e-15:
        theta = 0.0
    return IwasawaSolution(float(lam), float(u), float(t), float(theta), float(resid))


def solution_point(sol: IwasawaSolution, sign: int) -> complex:
    """N_h(tau0) for h = n_u a_t k_theta: the lattice shape predicted by the solution."""
    c, s = math.cos(2 * math.pi * sol.theta), math.sin(2 * math.pi * sol.theta)
    tau0 = BASE_SHAPE[1 if sign > 0 else -1]
    rotated = (c * tau0 + s) / (-s * tau0 + c)
    return -sol.u + rotated / sol.t ** 2


def solution_group_point(sol: IwasawaSolution) -> complex:
    """N_h(i) = -u + i / t^2, the K-invariant point of the solution."""
    return complex(-sol.u, 1.0 / sol.t ** 2)


def cusp_barrier(disc: int, sign: int) -> float:
    """Lower bound on t for any form with |a| >= 1 of the given discriminant."""
    return CUSP_C0[1 if sign > 0 else -1] * abs(disc) ** (-1.0 / 12.0)
