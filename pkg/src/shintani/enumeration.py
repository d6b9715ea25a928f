"""SL2(Z)-classes of integral binary cubic forms of bounded discriminant.

Irreducible classes come from a reduced-form search: for negative
discriminant the complex root of f(v, 1) lies in the standard fundamental
domain, for positive discriminant the Hessian is Gauss reduced.  In both
cases the leading coefficient is made positive with -I.  Reducible classes
come from a sweep of the region b v^2 w + c v w^2 + d w^3, 0 <= c < 2b.

The coefficient bounds follow from writing f = lam^3 (n_u a_t k_theta).x_sign
with |u| <= 1/2, t <= (4/3)^(1/4) and t bounded below through |a| >= 1.
Kernels run in int64; |disc| <= MAX_DISC keeps every monomial below 2^62.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numba
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cubic_forms import (
    CubicForm, QuadForm, S_MAT, T_INV, T_MAT, act, act_quadratic, as_form, discriminant,
    hessian, is_dual_integral, is_irreducible, mat_mul, rational_roots,
)
from .shapes import fundamental_domain_reduce

MAX_DISC = 10 ** 8
ORACLE_MAX_DISC = 10 ** 4
U_MAT = ((0, -1), (1, -1))  # order 3, fixes the point rho
U2_MAT = mat_mul(U_MAT, U_MAT)

_T0 = (4.0 / 3.0) ** 0.25  # largest t with -u + i/t^2 in the fundamental domain
_C108 = 108.0 ** 0.25
SCHEME_ID = "hessian-root-v1"


@dataclass(frozen=True)
class FormClass:
    rep: CubicForm
    disc: int
    stab_order: int
    irreducible: bool
    square_disc_quadratic: bool


@dataclass(frozen=True)
class SingularClassTag:
    component: str
    params: tuple = ()
    witness: tuple = ((1, 0), (0, 1))

    def __str__(self) -> str:
        return f"{self.component}{self.params}" if self.params else self.component


# --- coefficient bounds -------------------------------------------------------

def search_bounds(sign: int, X: int) -> dict:
    """Bounds on (a, b) and the c-bound constants for the reduced search."""
    lam3 = X ** 0.25
    slack = 1e-9
    if sign < 0:
        r2 = math.sqrt(2.0)
        amax = lam3 * _T0 ** 3 / r2
        bmax = lam3 * _T0 * math.sqrt(9 * _T0 ** 4 / 4 + 1) / r2
    else:
        amax = lam3 * _T0 ** 3 / _C108
        bmax = 3 * lam3 * _T0 * math.sqrt(_T0 ** 4 / 4 + 1) / _C108
    return {"amax": int(math.floor(amax * (1 + slack))),
            "bmax": int(math.floor(bmax * (1 + slack))), "lam3": lam3}


def _c_bound_neg(lam3: float, a: int) -> float:
    # |c| <= lam^3/sqrt2 (3 t^3 u^2 + t |2u| + 1/t), 1/t <= (lam^3/(sqrt2 a))^(1/3)
    r2 = math.sqrt(2.0)
    return lam3 / r2 * (0.75 * _T0 ** 3 + _T0 + (lam3 / (r2 * a)) ** (1.0 / 3.0))


# --- numba kernels ------------------------------------------------------------

@numba.njit(cache=True)
def _ev(a, b, c, d, p, q):
    return a * p * p * p + b * p * p * q + c * p * q * q + d * q * q * q


@numba.njit(cache=True)
def _act(a, b, c, d, g11, g12, g21, g22):
    # f((v, w) g) with (v, w) g = (g11 v + g21 w, g12 v + g22 w)
    p, q, r, s = g11, g21, g12, g22
    A = a * p * p * p + b * p * p * r + c * p * r * r + d * r * r * r
    B = (3 * a * p * p * q + b * (p * p * s + 2 * p * q * r)
         + c * (2 * p * r * s + q * r * r) + 3 * d * r * r * s)
    C = (3 * a * p * q * q + b * (2 * p * q * s + q * q * r)
         + c * (p * s * s + 2 * q * r * s) + 3 * d * r * s * s)
    D = a * q * q * q + b * q * q * s + c * q * s * s + d * s * s * s
    return A, B, C, D


@numba.njit(cache=True)
def _disc(a, b, c, d):
    return b * b * c * c + 18 * a * b * c * d - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d


@numba.njit(cache=True)
def _lex_less(x0, x1, x2, x3, y0, y1, y2, y3):
    if x0 != y0:
        return x0 < y0
    if x1 != y1:
        return x1 < y1
    if x2 != y2:
        return x2 < y2
    return x3 < y3


@numba.njit(cache=True)
def _has_rational_root(a, b, c, d):
    """Rational root test; a != 0."""
    if d == 0:
        return True
    aa = abs(a)
    dd = abs(d)
    bound = 1 + max(abs(b), abs(c), dd) // aa + 1
    q = 1
    while q <= aa:
        if aa % q == 0:
            p = 1
            while p * p <= dd:
                if dd % p == 0:
                    for pp in (p, dd // p):
                        if pp <= bound * q:
                            if _ev(a, b, c, d, pp, q) == 0 or _ev(a, b, c, d, -pp, q) == 0:
                                return True
                p += 1
        q += 1
    return False


@numba.njit(cache=True)
def _isqrt(n):
    if n < 0:
        return -1
    r = np.int64(math.sqrt(float(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@numba.njit(cache=True)
def _grow(buf, n):
    if n < buf.shape[0]:
        return buf
    new = np.empty((2 * buf.shape[0], buf.shape[1]), dtype=np.int64)
    new[: buf.shape[0]] = buf
    return new


@numba.njit(cache=True)
def _neg_irreducible(X, amax, bmax, cmax_by_a):
    """Reduced irreducible forms with -X <= disc < 0; columns a,b,c,d,disc."""
    buf = np.empty((1024, 5), dtype=np.int64)
    n = 0
    for a in range(1, amax + 1):
        cm = cmax_by_a[a]
        for b in range(-bmax, bmax + 1):
            for c in range(-cm, cm + 1):
                B = 18 * a * b * c - 4 * b * b * b
                C0 = b * b * c * c - 4 * a * c * c * c
                # disc(d) = -27 a^2 d^2 + B d + C0 >= -X
                A2 = 27.0 * a * a
                dis = float(B) * float(B) + 4.0 * A2 * (float(C0) + X)
                if dis < 0:
                    continue
                sq = math.sqrt(dis)
                lo = np.int64(math.floor((B - sq) / (2 * A2))) - 1
                hi = np.int64(math.ceil((B + sq) / (2 * A2))) + 1
                for d in range(lo, hi + 1):
                    if d == 0:
                        continue
                    D = -27 * a * a * d * d + B * d + C0
                    if D >= 0 or D < -X:
                        continue
                    # real root in (-b/a - 1, -b/a + 1) and in (-|d|/a, |d|/a)
                    if _ev(a, b, c, d, -b - a, a) >= 0 or _ev(a, b, c, d, -b + a, a) <= 0:
                        continue
                    ad = abs(d)
                    if _ev(a, b, c, d, -ad, a) >= 0 or _ev(a, b, c, d, ad, a) <= 0:
                        continue
                    if _has_rational_root(a, b, c, d):
                        continue
                    buf = _grow(buf, n)
                    buf[n, 0] = a
                    buf[n, 1] = b
                    buf[n, 2] = c
                    buf[n, 3] = d
                    buf[n, 4] = D
                    n += 1
    return buf[:n]


@numba.njit(cache=True)
def _pos_irreducible(X, amax, bmax):
    """Reduced irreducible forms with 0 < disc <= X; columns a,b,c,d,disc,stab."""
    buf = np.empty((1024, 6), dtype=np.int64)
    n = 0
    pmax = _isqrt(X)
    for a in range(1, amax + 1):
        for b in range(-bmax, bmax + 1):
            # P = b^2 - 3ac in [1, pmax]
            clo = -((pmax - b * b) // (3 * a))  # ceil((b^2 - pmax) / 3a)
            chi = (b * b - 1) // (3 * a)
            for c in range(clo, chi + 1):
                P = b * b - 3 * a * c
                if P < 1 or P > pmax:
                    continue
                dlo = -((P - b * c) // (9 * a))  # ceil((bc - P) / 9a)
                dhi = (b * c + P) // (9 * a)
                for d in range(dlo, dhi + 1):
                    Q = b * c - 9 * a * d
                    R = c * c - 3 * b * d
                    if abs(Q) > P or P > R:
                        continue
                    if (abs(Q) == P or P == R) and Q < 0:
                        continue
                    D = _disc(a, b, c, d)
                    if D <= 0 or D > X:
                        continue
                    if _has_rational_root(a, b, c, d):
                        continue
                    stab = 1
                    keep = True
                    if Q == 0 and P == R:
                        A, B, C, DD = _act(a, b, c, d, 0, -1, 1, 0)
                        if A < 0:
                            A, B, C, DD = -A, -B, -C, -DD
                        if _lex_less(A, B, C, DD, a, b, c, d):
                            keep = False
                    elif Q == P and P == R:
                        A, B, C, DD = _act(a, b, c, d, 0, -1, 1, -1)
                        A2, B2, C2, D2 = _act(A, B, C, DD, 0, -1, 1, -1)
                        if A == a and B == b and C == c and DD == d:
                            stab = 3
                        if A < 0:
                            A, B, C, DD = -A, -B, -C, -DD
                        if A2 < 0:
                            A2, B2, C2, D2 = -A2, -B2, -C2, -D2
                        if _lex_less(A, B, C, DD, a, b, c, d) or _lex_less(A2, B2, C2, D2, a, b, c, d):
                            keep = False
                    if not keep:
                        continue
                    buf = _grow(buf, n)
                    buf[n, 0] = a
                    buf[n, 1] = b
                    buf[n, 2] = c
                    buf[n, 3] = d
                    buf[n, 4] = D
                    buf[n, 5] = stab
                    n += 1
    return buf[:n]


@numba.njit(cache=True)
def _egcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b != 0:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@numba.njit(cache=True)
def _region_rep(a, b, c, d, p, q):
    """Move the projective root (p:q) of f to infinity and normalise into the region."""
    g, x, y = _egcd(p, q)
    # p x + q y = g = +-1; complete [[p, q], [r, s]] with p s - q r = 1
    if g < 0:
        x, y = -x, -y
    r, s = -y, x
    A, B, C, D = _act(a, b, c, d, p, q, r, s)
    if B < 0:
        A, B, C, D = -A, -B, -C, -D
    m = 2 * B
    cc = C % m
    k = (cc - C) // m
    D = B * k * k + C * k + D
    return B, cc, D


@numba.njit(cache=True)
def _gcd(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


@numba.njit(cache=True)
def _reducible(X, sign):
    """Canonical region representatives; columns 0,b,c,d,disc,stab,square."""
    buf = np.empty((1024, 7), dtype=np.int64)
    n = 0
    bmax = _isqrt(X)
    for b in range(1, bmax + 1):
        Dmax = X // (b * b)
        if Dmax == 0:
            break
        for c in range(0, 2 * b):
            if sign > 0:
                # 1 <= c^2 - 4bd <= Dmax
                dhi = (c * c - 1) // (4 * b)
                dlo = -((Dmax - c * c) // (4 * b))
            else:
                # -Dmax <= c^2 - 4bd <= -1
                dlo = -((-c * c - 1) // (4 * b))
                dhi = (c * c + Dmax) // (4 * b)
            for d in range(dlo, dhi + 1):
                Dq = c * c - 4 * b * d
                if Dq == 0 or (sign > 0) != (Dq > 0) or abs(Dq) > Dmax:
                    continue
                sq = _isqrt(Dq) if Dq > 0 else -1
                square = sq >= 0 and sq * sq == Dq
                stab = 1
                if square:
                    keep = True
                    same = 0
                    for sgn in (1, -1):
                        p = -c + sgn * sq
                        q = 2 * b
                        g = _gcd(p, q)
                        p //= g
                        q //= g
                        B2, C2, D2 = _region_rep(0, b, c, d, p, q)
                        if B2 == b and C2 == c and D2 == d:
                            same += 1
                        elif _lex_less(0, B2, C2, D2, 0, b, c, d):
                            keep = False
                    if not keep:
                        continue
                    if same == 2:
                        stab = 3
                buf = _grow(buf, n)
                buf[n, 0] = 0
                buf[n, 1] = b
                buf[n, 2] = c
                buf[n, 3] = d
                buf[n, 4] = b * b * Dq
                buf[n, 5] = stab
                buf[n, 6] = 1 if square else 0
                n += 1
    return buf[:n]


# --- public enumeration -------------------------------------------------------

@dataclass
class ClassTable:
    """Columnar class list sorted by (|disc|, a, b, c, d)."""
    sign: int
    max_disc: int
    reps: np.ndarray        # (N, 4) int64
    disc: np.ndarray        # (N,) int64
    stab: np.ndarray        # (N,) int64
    irreducible: np.ndarray  # (N,) bool
    square: np.ndarray      # (N,) bool

    def __len__(self) -> int:
        return self.reps.shape[0]

    def classes(self) -> Iterator[FormClass]:
        for i in range(len(self)):
            yield FormClass(CubicForm(*(int(v) for v in self.reps[i])), int(self.disc[i]),
                            int(self.stab[i]), bool(self.irreducible[i]), bool(self.square[i]))

    def select(self, mask) -> "ClassTable":
        return ClassTable(self.sign, self.max_disc, self.reps[mask], self.disc[mask],
                          self.stab[mask], self.irreducible[mask], self.square[mask])


def enumerate_table(sign: int, X: int, irreducible_only: bool = False) -> ClassTable:
    if X < 1:
        raise ValueError("X must be positive")
    if X > MAX_DISC:
        raise ValueError(f"X > {MAX_DISC} exceeds the int64 kernel range")
    sign = 1 if sign > 0 else -1
    bd = search_bounds(sign, X)
    if sign < 0:
        cmax = np.zeros(bd["amax"] + 1, dtype=np.int64)
        for a in range(1, bd["amax"] + 1):
            cmax[a] = int(math.floor(_c_bound_neg(bd["lam3"], a) * (1 + 1e-9)))
        irr = _neg_irreducible(np.int64(X), bd["amax"], bd["bmax"], cmax)
        irr_stab = np.ones(len(irr), dtype=np.int64)
    else:
        irr = _pos_irreducible(np.int64(X), bd["amax"], bd["bmax"])
        irr_stab = irr[:, 5]
    parts = [(irr[:, :4], irr[:, 4], irr_stab, np.ones(len(irr), bool), np.zeros(len(irr), bool))]
    if not irreducible_only:
        red = _reducible(np.int64(X), np.int64(sign))
        parts.append((red[:, :4], red[:, 4], red[:, 5], np.zeros(len(red), bool), red[:, 6].astype(bool)))
    reps = np.concatenate([p[0] for p in parts]).astype(np.int64)
    disc = np.concatenate([p[1] for p in parts]).astype(np.int64)
    stab = np.concatenate([p[2] for p in parts]).astype(np.int64)
    irred = np.concatenate([p[3] for p in parts])
    square = np.concatenate([p[4] for p in parts])
    order = np.lexsort((reps[:, 3], reps[:, 2], reps[:, 1], reps[:, 0], np.abs(disc)))
    return ClassTable(sign, X, reps[order], disc[order], stab[order], irred[order], square[order])


def enumerate_classes(sign: int, X: int, irreducible_only: bool = False) -> Iterator[FormClass]:
    """One FormClass per SL2(Z)-class with 0 < sign*disc <= X, ordered by (|disc|, rep)."""
    return enumerate_table(sign, X, irreducible_only).classes()


# --- single-form reduction ----------------------------------------------------

def _neg_reduced(f) -> bool:
    a, b, c, d = f
    if a <= 0:
        return False
    ev = lambda p, q: a * p ** 3 + b * p * p * q + c * p * q * q + d * q ** 3
    return ev(-b - a, a) < 0 < ev(-b + a, a) and ev(-abs(d), a) < 0 < ev(abs(d), a)


def reduce_quadratic(q: Sequence):
    """Gauss reduction of a positive definite integral form.

    Returns (reduced form, gamma) with act_quadratic(gamma, q) reduced:
    |B| <= A <= C and B >= 0 whenever |B| = A or A = C.
    """
    A, B, C = (int(x) for x in q)
    if A <= 0 or B * B - 4 * A * C >= 0:
        raise ValueError("positive definite form expected")
    g = ((1, 0), (0, 1))
    while True:
        # B -> B + 2 A n with (v, w) -> (v + n w, w)
        n = (A - B) // (2 * A)  # brings B into (-A, A]
        if n:
            t = ((1, 0), (n, 1))
            A, B, C = act_quadratic(t, (A, B, C))
            g = mat_mul(t, g)
        if A > C:
            A, B, C = act_quadratic(S_MAT, (A, B, C))
            g = mat_mul(S_MAT, g)
            continue
        break
    if A == C and B < 0:
        A, B, C = act_quadratic(S_MAT, (A, B, C))
        g = mat_mul(S_MAT, g)
    return QuadForm(A, B, C), g


def _neg(g):
    return ((-g[0][0], -g[0][1]), (-g[1][0], -g[1][1]))


def canonical_reduce(f: Sequence):
    """(canonical representative, gamma) with act(gamma, f) = representative.

    Irreducible input only; equal representatives iff SL2(Z)-equivalent.
    """
    f = as_form(f)
    P = discriminant(f)
    if P == 0:
        raise ValueError("singular form")
    if not is_irreducible(f):
        raise ValueError("reducible form; use reduce_reducible")
    if P < 0:
        from .shapes import covariant_tau
        beta = covariant_tau(np.array([f], dtype=float))[0]
        _, M = fundamental_domain_reduce(beta, tol=0.0)
        (A, B), (C, D) = M
        g = ((D, -C), (-B, A))  # root_map(g) = M
        h = act(g, f)
        if h.a < 0:
            h, g = act(((-1, 0), (0, -1)), h), _neg(g)
        if not _neg_reduced(h):
            # rounding at the boundary: search the neighbouring cells
            for w in (((1, 0), (1, 1)), ((1, 0), (-1, 1)), S_MAT, mat_mul(S_MAT, ((1, 0), (1, 1))),
                      mat_mul(S_MAT, ((1, 0), (-1, 1))), mat_mul(((1, 0), (1, 1)), S_MAT),
                      mat_mul(((1, 0), (-1, 1)), S_MAT)):
                for sgn in (w, _neg(w)):
                    cand = act(sgn, h)
                    if _neg_reduced(cand):
                        return cand, mat_mul(sgn, g)
            raise ArithmeticError(f"reduction failed for {f}")
        return h, g
    _, g = reduce_quadratic(hessian(f))
    h = act(g, f)
    if h.a < 0:
        h, g = act(((-1, 0), (0, -1)), h), _neg(g)
    H = hessian(h)
    auts = []
    if H.b == 0 and H.a == H.c:
        auts = [S_MAT]
    elif H.b == H.a == H.c:
        auts = [U_MAT, U2_MAT]
    best, best_g = h, g
    for w in auts:
        cand, cg = act(w, h), mat_mul(w, g)
        if cand.a < 0:
            cand, cg = act(((-1, 0), (0, -1)), cand), _neg(cg)
        if cand < best:
            best, best_g = cand, cg
    return best, best_g


def _projective_roots(f: CubicForm) -> list[tuple[int, int]]:
    """Primitive (p, q) with f(p, q) = 0, one per rational root."""
    a, b, c, d = f
    roots = []
    if a == 0:
        roots.append((1, 0))
        if b != 0:
            D = c * c - 4 * b * d
            if D >= 0:
                s = math.isqrt(D)
                if s * s == D:
                    for p in {-c + s, -c - s}:
                        g = math.gcd(p, 2 * b)
                        p, q = p // g, 2 * b // g
                        if q < 0:
                            p, q = -p, -q
                        roots.append((p, q))
        return roots
    for r in rational_roots(f):
        roots.append((r.numerator, r.denominator))
    return roots


def _region_rep_py(f: CubicForm, p: int, q: int) -> CubicForm:
    g = math.gcd(p, q)
    p, q = p // g, q // g
    _, x, y = _egcd_py(p, q)
    gamma = ((p, q), (-y, x))
    h = act(gamma, f)
    assert h.a == 0
    B, C, D = h.b, h.c, h.d
    if B < 0:
        B, C, D = -B, -C, -D
    cc = C % (2 * B)
    k = (cc - C) // (2 * B)
    return CubicForm(0, B, cc, B * k * k + C * k + D)


def _egcd_py(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def reduce_reducible(f: Sequence) -> list[CubicForm]:
    """The representatives of f's class in the region 0 <= c < 2b (1 or 3)."""
    f = as_form(f)
    if discriminant(f) == 0:
        raise ValueError("singular form")
    if f.a != 0 and is_irreducible(f):
        raise ValueError("irreducible form")
    return sorted({_region_rep_py(f, p, q) for p, q in _projective_roots(f)})


def stabilizer_order(f: Sequence) -> int:
    f = as_form(f)
    P = discriminant(f)
    if P == 0:
        raise ValueError("singular form")
    if P < 0:
        return 1
    if f.a != 0 and is_irreducible(f):
        rep, _ = canonical_reduce(f)
        return 3 if act(U_MAT, rep) == rep else 1
    reps = reduce_reducible(f)
    return 3 if len(reps) == 1 and len(_projective_roots(reps[0])) == 3 else 1


def form_class(f: Sequence) -> FormClass:
    """Canonical class record of a single nondegenerate form."""
    f = as_form(f)
    P = discriminant(f)
    if P == 0:
        raise ValueError("singular form")
    if f.a != 0 and is_irreducible(f):
        rep, _ = canonical_reduce(f)
        return FormClass(rep, P, stabilizer_order(rep), True, False)
    reps = reduce_reducible(f)
    rep = reps[0]
    D = rep.c ** 2 - 4 * rep.b * rep.d
    square = D > 0 and math.isqrt(D) ** 2 == D
    return FormClass(rep, P, stabilizer_order(rep), False, square)


# --- oracle -------------------------------------------------------------------

ORACLE_SLACK = 1e-6


def oracle_box(sign: int, X: int) -> dict:
    """Coefficient box for the oracle scan.

    a != 0: |a| <= X^(1/4), |b| <= 2 X^(1/4), |c| <= X^(1/2)/2 + 2 X^(1/4),
    these dominate the reduction bounds lam^3 t^3, 3 lam^3 t^2 |z| and the
    Hessian range P <= X^(1/2) by a margin; a = 0: |b| <= X^(1/2),
    |c| <= |b| + 1.  d ranges over every value allowed by the discriminant.
    """
    q = X ** 0.25
    return {"sign": sign, "max_disc": X, "a_max": int(math.ceil(q)),
            "b_max": int(math.ceil(2 * q)), "c_max": int(math.ceil(math.sqrt(X) / 2 + 2 * q)),
            "region": f"|x| <= 1/2 + {ORACLE_SLACK}, |tau| >= 1 - {ORACLE_SLACK}"}


def _box_forms(sign: int, X: int, box: dict) -> np.ndarray:
    rows = []
    ra = np.arange(-box["a_max"], box["a_max"] + 1)
    ra = ra[ra != 0]
    rb = np.arange(-box["b_max"], box["b_max"] + 1)
    rc = np.arange(-box["c_max"], box["c_max"] + 1)
    A1, B1, C1 = (v.ravel() for v in np.meshgrid(ra, rb, rc, indexing="ij"))
    # disc = -27 a^2 d^2 + (18abc - 4b^3) d + (b^2 c^2 - 4ac^3) >= -X
    Bq = 18.0 * A1 * B1 * C1 - 4.0 * B1 ** 3
    Cq = B1 * B1 * C1 * C1 - 4.0 * A1 * C1 ** 3
    A2 = 27.0 * A1 * A1
    dis = Bq * Bq + 4 * A2 * (Cq + X)
    ok = dis >= 0
    sq = np.sqrt(np.where(ok, dis, 0))
    lo = np.floor((Bq - sq) / (2 * A2)).astype(np.int64) - 1
    hi = np.ceil((Bq + sq) / (2 * A2)).astype(np.int64) + 1
    cnt = np.where(ok, hi - lo + 1, 0)
    idx = np.repeat(np.arange(len(A1)), cnt)
    start = np.repeat(np.cumsum(cnt) - cnt, cnt)
    dd = lo[idx] + (np.arange(idx.size) - start)
    rows.append(np.stack([A1[idx], B1[idx], C1[idx], dd], axis=1))
    # a = 0: disc = b^2 (c^2 - 4bd)
    bmax0 = math.isqrt(X)
    for b in range(-bmax0, bmax0 + 1):
        if b == 0:
            continue
        Dmax = X // (b * b)
        c = np.arange(-abs(b) - 1, abs(b) + 2)
        lo_ = np.floor((c * c - Dmax) / (4.0 * abs(b))).astype(np.int64) - 1
        hi_ = np.ceil((c * c + Dmax) / (4.0 * abs(b))).astype(np.int64) + 1
        cnt = hi_ - lo_ + 1
        ci = np.repeat(np.arange(len(c)), cnt)
        st = np.repeat(np.cumsum(cnt) - cnt, cnt)
        d = (lo_[ci] + (np.arange(ci.size) - st)) * (1 if b > 0 else -1)
        rows.append(np.stack([np.zeros_like(d), np.full_like(d, b), c[ci], d], axis=1))
    F = np.concatenate(rows).astype(np.int64)
    a, b, c, d = F.T
    disc = b * b * c * c + 18 * a * b * c * d - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d
    keep = (sign * disc > 0) & (np.abs(disc) <= X)
    F = np.unique(F[keep], axis=0)
    from .shapes import covariant_tau
    tau = covariant_tau(F.astype(float))
    eps = ORACLE_SLACK
    inside = (np.abs(tau.real) <= 0.5 + eps) & (np.abs(tau) >= 1 - eps)
    return F[inside]


def _apply_rows(g, F):
    out = np.empty_like(F)
    for i in range(F.shape[0]):
        out[i] = _act(F[i, 0], F[i, 1], F[i, 2], F[i, 3], g[0][0], g[0][1], g[1][0], g[1][1])
    return out


_apply_rows = numba.njit(cache=True)(_apply_rows)


def _lookup(F: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Index of each row of G in the row set F, or -1."""
    Fv = np.ascontiguousarray(F).view([("", F.dtype)] * 4).ravel()
    Gv = np.ascontiguousarray(G).view([("", G.dtype)] * 4).ravel()
    order = np.argsort(Fv)
    pos = np.minimum(np.searchsorted(Fv[order], Gv), len(Fv) - 1)
    hit = Fv[order][pos] == Gv
    return np.where(hit, order[pos], -1)


def enumerate_oracle(sign: int, X: int):
    """Brute-force classes: box scan plus connected components under S, T, -I.

    Returns (classes, box, members) where each class's rep is the
    lexicographically smallest member of its component and members maps
    scanned forms to component labels.
    """
    if X > ORACLE_MAX_DISC:
        raise ValueError(f"oracle is limited to X <= {ORACLE_MAX_DISC}")
    sign = 1 if sign > 0 else -1
    box = oracle_box(sign, X)
    F = _box_forms(sign, X, box)
    n = F.shape[0]
    box["forms"] = int(n)
    src, dst = [], []
    for g in (S_MAT, ((1, 0), (1, 1)), ((1, 0), (-1, 1)), ((-1, 0), (0, -1))):
        j = _lookup(F, _apply_rows(g, F))
        src.append(np.flatnonzero(j >= 0))
        dst.append(j[j >= 0])
    src, dst = np.concatenate(src), np.concatenate(dst)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    ncomp, label = connected_components(graph, directed=False)
    a, b, c, d = F.T
    disc = b * b * c * c + 18 * a * b * c * d - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d
    fixed = (_apply_rows(U_MAT, F) == F).all(axis=1)
    has_fixed = np.zeros(ncomp, bool)
    np.logical_or.at(has_fixed, label, fixed)
    lex = np.lexsort((d, c, b, a, label))
    first = lex[np.r_[True, label[lex][1:] != label[lex][:-1]]]
    out = []
    for i in first:
        rep = CubicForm(*(int(v) for v in F[i]))
        irred = rep.a != 0 and is_irreducible(rep)
        D = int(disc[i])
        square = (not irred) and D > 0 and math.isqrt(D) ** 2 == D
        out.append(FormClass(rep, D, 3 if has_fixed[label[i]] else 1, irred, square))
    out.sort(key=lambda k: (abs(k.disc), tuple(k.rep)))
    box["components"] = int(ncomp)
    return out, box, (F, label)


def _locate(index: dict, rep) -> int:
    """Index of a scanned form equivalent to rep, found by moving its covariant point."""
    from .shapes import covariant_tau
    f = CubicForm(*(int(v) for v in rep))
    tau = covariant_tau(np.array([f], dtype=float))[0]
    _, M = fundamental_domain_reduce(tau, tol=0.0)
    (A, B), (C, D) = M
    h = act(((D, -C), (-B, A)), f)
    for cand in [h] + [act(g, h) for g in (S_MAT, ((1, 0), (1, 1)), ((1, 0), (-1, 1)))]:
        if tuple(cand) in index:
            return index[tuple(cand)]
    return -1


def compare_with_oracle(sign: int, X: int) -> dict:
    """Match enumerated classes to oracle components; report any mismatch."""
    table = enumerate_table(sign, X)
    oracle, box, (F, label) = enumerate_oracle(sign, X)
    index = {tuple(int(v) for v in row): i for i, row in enumerate(F)}
    j = np.array([_locate(index, rep) for rep in table.reps], dtype=np.int64)
    rep_j = _lookup(F, np.array([o.rep for o in oracle], dtype=np.int64).reshape(-1, 4))
    by_comp = {int(label[k]): o for k, o in zip(rep_j, oracle)}
    problems = []
    seen = set()
    for i, cl in enumerate(table.classes()):
        if j[i] < 0:
            problems.append(f"rep {tuple(cl.rep)} not in oracle scan")
            continue
        ci = int(label[j[i]])
        if ci in seen:
            problems.append(f"rep {tuple(cl.rep)} shares a component")
        seen.add(ci)
        o = by_comp[ci]
        if (o.disc, o.stab_order, o.irreducible, o.square_disc_quadratic) != (
                cl.disc, cl.stab_order, cl.irreducible, cl.square_disc_quadratic):
            problems.append(f"rep {tuple(cl.rep)}: enumerated {cl} vs oracle {o}")
    missing = sorted(set(by_comp) - seen)
    for ci in missing[:20]:
        problems.append(f"oracle class {by_comp[ci]} not enumerated")
    return {"sign": sign, "max_disc": X, "enumerated": len(table), "oracle": len(oracle),
            "missing": len(missing), "problems": problems, "box": box}


# --- singular forms -----------------------------------------------------------

def _complete(p: int, q: int):
    """Unimodular matrix with first row (p, q) (primitive)."""
    _, x, y = _egcd_py(p, q)
    return ((p, q), (-y, x))


def _inverse(g):
    (a, b), (c, d) = g
    return ((d, -b), (-c, a))


def _repeated_root(f: CubicForm):
    """Primitive (p, q) of the repeated root of a singular nonzero cubic form."""
    a, b, c, d = f
    if a == 0 and b == 0:
        return (1, 0)
    if a == 0:
        p, q = -c, 2 * b
    else:
        P = b * b - 3 * a * c
        if P == 0:
            p, q = -b, 3 * a
        else:
            p, q = 9 * a * d - b * c, 2 * P
    g = math.gcd(p, q)
    return p // g, q // g


def classify_singular_dual(f: Sequence) -> SingularClassTag:
    """Place a singular dual form in {0}, TypeI(m), TypeII(m, n) with a witness.

    witness gamma satisfies act(gamma, canonical member) = f.
    """
    f = as_form(f)
    if discriminant(f) != 0:
        raise ValueError("nonsingular form")
    if not is_dual_integral(f):
        raise ValueError("form is not dual integral")
    if f == (0, 0, 0, 0):
        return SingularClassTag("Zero")
    p, q = _repeated_root(f)
    g = _complete(p, q)
    h = act(g, f)
    assert h.a == 0 and h.b == 0, (f, h)
    if h.c == 0:
        if h.d < 0:
            h, g = act(((-1, 0), (0, -1)), h), _neg(g)
        return SingularClassTag("TypeI", (h.d,), _inverse(g))
    if h.c < 0:
        h, g = act(((-1, 0), (0, -1)), h), _neg(g)
    n = h.d % h.c
    k = (n - h.d) // h.c
    t = ((1, 0), (k, 1))  # d -> d + c k
    h, g = act(t, h), mat_mul(t, g)
    assert h.c % 3 == 0
    return SingularClassTag("TypeII", (h.c // 3, h.d), _inverse(g))


def classify_singular_quadratic(q: Sequence) -> SingularClassTag:
    """Place a singular dual quadratic form (even middle coefficient).

    Components: Zero, QI(l) = (0, 0, l), QII(m, n) ~ (0, 2m, n) with
    0 <= n < |2m|, QIII(l, b, d) ~ l (b^2, 2bd, d^2) with gcd(b, d) = 1 and
    0 <= d < b.  witness u gives (a, b, c) -> (a, b + 2au, au^2 + bu + c).
    """
    A, B, C = (int(x) for x in q)
    if B % 2:
        raise ValueError("dual quadratic forms have even middle coefficient")
    if A != 0 and B * B - 4 * A * C != 0:
        raise ValueError("nonsingular form")
    if A == 0 and B == 0:
        return SingularClassTag("Zero") if C == 0 else SingularClassTag("QI", (C,))
    if A == 0:
        m2 = B
        n = C % abs(m2)
        # (0, 2m, c) -> (0, 2m, 2m u + c)
        u = (n - C) // m2
        return SingularClassTag("QII", (m2 // 2, n), (-u,))
    h = B // 2
    ell = math.gcd(math.gcd(A, h), C) * (1 if A > 0 else -1)
    b = math.isqrt(A // ell)
    d = h // (ell * b)
    dd = d % b
    u = (dd - d) // b
    # (b v + d w)^2 -> (b v + (b u + d) w)^2 under (v, w) -> (v + u w, w)
    return SingularClassTag("QIII", (ell, b, dd), (-u,))


def act_borel(u: int, q: Sequence) -> QuadForm:
    """Lower unipotent element [[1, 0], [u, 1]] acting by Q -> g Q g^T."""
    A, B, C = q
    return QuadForm(A, B + 2 * A * u, A * u * u + B * u + C)


def canonical_singular_dual(tag: SingularClassTag) -> CubicForm:
    if tag.component == "Zero":
        return CubicForm(0, 0, 0, 0)
    if tag.component == "TypeI":
        return CubicForm(0, 0, 0, tag.params[0])
    m, n = tag.params
    return CubicForm(0, 0, 3 * m, n)


def canonical_singular_quadratic(tag: SingularClassTag) -> QuadForm:
    if tag.component == "Zero":
        return QuadForm(0, 0, 0)
    if tag.component == "QI":
        return QuadForm(0, 0, tag.params[0])
    if tag.component == "QII":
        m, n = tag.params
        return QuadForm(0, 2 * m, n)
    ell, b, d = tag.params
    return QuadForm(ell * b * b, 2 * ell * b * d, ell * d * d)


def _tag_in_range(tag: SingularClassTag) -> bool:
    c, p = tag.component, tag.params
    if c == "TypeI":
        return p[0] != 0
    if c == "TypeII":
        return p[0] > 0 and 0 <= p[1] < 3 * p[0]
    if c == "QI":
        return p[0] != 0
    if c == "QII":
        return p[0] != 0 and 0 <= p[1] < abs(2 * p[0])
    if c == "QIII":
        return p[0] != 0 and p[1] > 0 and 0 <= p[2] < max(p[1], 1) and math.gcd(p[1], p[2]) == 1
    return c == "Zero"


def singular_dual_forms(height: int) -> np.ndarray:
    """All singular dual-integral cubic forms with max |coefficient| <= height."""
    r = np.arange(-height, height + 1, dtype=np.int64)
    r3 = r[r % 3 == 0]
    A, B, C, D = np.meshgrid(r, r3, r3, r, indexing="ij")
    F = np.stack([A.ravel(), B.ravel(), C.ravel(), D.ravel()], axis=1)
    a, b, c, d = F.T
    disc = b * b * c * c + 18 * a * b * c * d - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d
    return F[disc == 0]


def singular_quadratic_forms(height: int) -> list:
    """Singular dual quadratic forms (A, 2h, C), max |coefficient| <= height: A = 0 or B^2 = 4AC."""
    out = []
    for A in range(-height, height + 1):
        for B in range(-height + (height % 2), height + 1, 2):
            for C in range(-height, height + 1):
                if A == 0 or B * B == 4 * A * C:
                    out.append(QuadForm(A, B, C))
    return out


def check_singular_bijection(height: int = 50) -> dict:
    """Partition check for singular dual cubic and quadratic forms in a box.

    Every form gets a tag in the index range whose witness carries the
    canonical member to it (so the components cover the box and each form
    lies in exactly one of them), the tag is constant along S and T moves,
    and each canonical member classifies to its own tag.
    """
    gens = (S_MAT, T_MAT, T_INV)
    cubic_errors, counts = [], {}
    for row in singular_dual_forms(height):
        f = CubicForm(*(int(v) for v in row))
        tag = classify_singular_dual(f)
        counts[tag.component] = counts.get(tag.component, 0) + 1
        canon = canonical_singular_dual(tag)
        ok = _tag_in_range(tag) and act(tag.witness, canon) == f
        ok = ok and classify_singular_dual(canon) == SingularClassTag(tag.component, tag.params)
        ok = ok and all(classify_singular_dual(act(g, f)).params == tag.params
                        and classify_singular_dual(act(g, f)).component == tag.component for g in gens)
        if not ok:
            cubic_errors.append(tuple(f))
    quad_errors, qcounts = [], {}
    for q in singular_quadratic_forms(height):
        tag = classify_singular_quadratic(q)
        qcounts[tag.component] = qcounts.get(tag.component, 0) + 1
        canon = canonical_singular_quadratic(tag)
        moved = [act_borel(u, q) for u in (-1, 1)]
        ok = _tag_in_range(tag)
        if tag.component in ("QII", "QIII"):
            ok = ok and act_borel(tag.witness[0], canon) == q
        else:
            ok = ok and canon == q
        ok = ok and all((classify_singular_quadratic(p).component, classify_singular_quadratic(p).params)
                        == (tag.component, tag.params) for p in moved)
        if not ok:
            quad_errors.append(tuple(q))
    return {"height": height, "cubic_counts": counts, "quadratic_counts": qcounts,
            "cubic_errors": cubic_errors, "quadratic_errors": quad_errors}
