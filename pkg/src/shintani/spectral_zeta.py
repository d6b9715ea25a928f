"""Eisenstein-twisted zeta functions of binary cubic forms: coefficients,
Weyl sums, the residue table and asymptotic fits.

Coefficients: c(m) = sum over classes of discriminant sign*m of
E(i gamma, g_{i,m}) / |Stab|, with E evaluated at the group point of the
class (the complex root for disc < 0, the Hessian root for disc > 0).
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eisenstein import EisensteinSeries
from .enumeration import ClassTable, enumerate_table
from .shapes import group_points
from .specfun import gamma_value, xi, zeta

FAMILIES = ("L-", "L+")
POLES = ("(5+z)/4", "(5-z)/4", "(11+z)/12", "(11-z)/12")
IRREDUCIBLE_POLES = ("(11+z)/12", "(11-z)/12")


def family_sign(family) -> int:
    if family in ("L-", "neg", "-", -1):
        return -1
    if family in ("L+", "pos", "+", 1):
        return 1
    raise ValueError(f"unknown family {family!r}")


def family_name(sign: int) -> str:
    return "L+" if sign > 0 else "L-"


def pole_location(pole: str, gamma: float) -> complex:
    z = 1j * gamma
    return {"(5+z)/4": (5 + z) / 4, "(5-z)/4": (5 - z) / 4,
            "(11+z)/12": (11 + z) / 12, "(11-z)/12": (11 - z) / 12}[pole]


# --- residue table --------------------------------------------------------------

def _residue_11(sign: int, z: complex, corrected: bool = False) -> complex:
    w = (1 - z) / 3
    if corrected:
        # Gamma((1-w)/2) / Gamma(1-w/2), the theta-average in the Sigma_2 evaluation
        ratio = gamma_value((2 + z) / 6) / gamma_value((5 + z) / 6)
        three = 3 if sign < 0 else 3 ** ((7 + z) / 4)
    else:
        ratio = gamma_value((4 - z) / 6) / gamma_value((7 - z) / 6)
        three = 3 if sign < 0 else 3 ** ((7 - z) / 4)
    val = (zeta(w).value * 2 ** ((z - 1) / 6) * math.pi ** ((2 * z + 1) / 6)
           * cmath.cos(math.pi * (1 - z) / 6) * gamma_value(w) * ratio)
    return val / three


def _residue_5(sign: int, z: complex, corrected: bool = False) -> complex:
    val = zeta(3 + z).value * 2 ** ((-5 - z) / 2)
    return val if sign < 0 else val * 3 ** ((1 + z) / 4)


def residue(family, pole: str, gamma: float, corrected: bool = False) -> complex:
    """Residue of the twisted zeta function at the given pole, z = i gamma.

    The (.-z) poles come from the (.+z) entries with z -> -z, times xi(z)/xi(1+z).
    corrected=True changes the (11+-z)/12 entries: the Gamma ratio becomes
    Gamma((2+z)/6)/Gamma((5+z)/6) and the L+ power of 3 becomes 3^{-(7+z)/4},
    matching the Sigma_2 integral computed directly (see lemmas.verify_sigma2).
    """
    if gamma == 0:
        raise ValueError("gamma = 0 is a pole of xi(z)")
    sign = family_sign(family)
    z = 1j * gamma
    if pole == "(5+z)/4":
        return _residue_5(sign, z)
    if pole == "(11+z)/12":
        return _residue_11(sign, z, corrected)
    mirror = xi(z).value / xi(1 + z).value
    if pole == "(5-z)/4":
        return mirror * _residue_5(sign, -z)
    if pole == "(11-z)/12":
        return mirror * _residue_11(sign, -z, corrected)
    raise ValueError(f"unknown pole {pole!r}")


@dataclass(frozen=True)
class ResidueTable:
    gamma: float
    entries: dict  # (family, pole) -> complex

    def __getitem__(self, key):
        return self.entries[key]


def residue_table(gamma: float, corrected: bool = False) -> ResidueTable:
    return ResidueTable(gamma, {(f, p): residue(f, p, gamma, corrected) for f in FAMILIES for p in POLES})


def mirror_defect(family, gamma: float) -> float:
    """Largest relative defect of the mirror rule, recomputed from the raw entries."""
    sign = family_sign(family)
    z = 1j * gamma
    ratio = xi(z).value / xi(1 + z).value
    out = 0.0
    for pole, base, raw in (("(5-z)/4", "(5+z)/4", _residue_5), ("(11-z)/12", "(11+z)/12", _residue_11)):
        lhs = residue(family, pole, gamma)
        rhs = ratio * raw(sign, -z)
        out = max(out, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    return out


# --- coefficients and Weyl sums ---------------------------------------------------

@dataclass
class CoefficientSeries:
    gamma: float
    sign: int
    irreducible_only: bool
    X_max: int
    c: np.ndarray = field(repr=False)       # complex, index m = 0..X_max
    count: np.ndarray = field(repr=False)   # weighted class count per m
    max_tail_bound: float = 0.0


def class_values(table: ClassTable, gamma: float, truncation_tol: float = 1e-10,
                 threads: int = 1, chunk: int = 200_000):
    """E(i gamma, .) at the group point of every class, with the largest tail bound."""
    E = EisensteinSeries(gamma, truncation_tol)
    n = len(table)
    vals = np.empty(n, dtype=complex)
    tails = np.zeros(max((n + chunk - 1) // chunk, 1))

    def work(k):
        lo, hi = k * chunk, min(n, (k + 1) * chunk)
        pts = group_points(table.reps[lo:hi].astype(float))
        bad = ~(np.isfinite(pts) & (pts.imag > 0))
        if bad.any():
            i = lo + int(np.flatnonzero(bad)[0])
            raise ArithmeticError(f"group point failed for class {tuple(table.reps[i])}")
        v, _, tb = E.eval_array(pts)
        vals[lo:hi] = v
        tails[k] = tb.max()

    nchunks = (n + chunk - 1) // chunk
    if threads > 1 and nchunks > 1:
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(work, range(nchunks)))
    else:
        for k in range(nchunks):
            work(k)
    return vals, float(tails.max()) if n else 0.0


def build_coefficients(gamma: float, sign: int, X: int, irreducible_only: bool = False,
                       table: ClassTable | None = None, truncation_tol: float = 1e-10,
                       threads: int = 1) -> CoefficientSeries:
    sign = 1 if sign > 0 else -1
    if table is None:
        table = enumerate_table(sign, X, irreducible_only)
    else:
        if table.sign != sign or table.max_disc < X:
            raise ValueError("class table does not cover the requested range")
        keep = np.abs(table.disc) <= X
        if irreducible_only:
            keep &= table.irreducible
        table = table.select(keep)
    vals, tail = class_values(table, gamma, truncation_tol, threads)
    weight = 1.0 / table.stab if sign > 0 else np.ones(len(table))
    m = np.abs(table.disc)
    w = vals * weight
    c = (np.bincount(m, weights=w.real, minlength=X + 1)
         + 1j * np.bincount(m, weights=w.imag, minlength=X + 1))
    count = np.bincount(m, weights=weight, minlength=X + 1)
    return CoefficientSeries(float(gamma), sign, irreducible_only, int(X), c, count, tail)


@dataclass(frozen=True)
class WeylSeries:
    X: np.ndarray   # grid
    S: np.ndarray   # complex partial sums


def geometric_grid(a: float, b: float, k: int) -> np.ndarray:
    if not (0 < a < b) or k < 2:
        raise ValueError("need 0 < a < b and at least 2 points")
    return np.unique(np.floor(np.geomspace(a, b, k) + 1e-9).astype(np.int64))


def parse_grid(spec: str) -> np.ndarray:
    kind, a, b, k = spec.split(":")
    if kind != "geometric":
        raise ValueError(f"unsupported grid {kind!r}")
    return geometric_grid(float(a), float(b), int(k))


def partial_sums(series: CoefficientSeries, grid) -> WeylSeries:
    """S(X) = sum_{m <= X} c(m) on the grid, with fsum over each grid segment."""
    grid = np.asarray(grid, dtype=np.int64)
    if grid.size == 0 or grid.min() < 0 or grid.max() > series.X_max:
        raise ValueError("grid must lie in [0, X_max]")
    order = np.argsort(grid, kind="stable")
    S = np.empty(grid.size, dtype=complex)
    re_parts, im_parts = [], []
    prev = 0
    for idx in order:
        x = int(grid[idx])
        seg = series.c[prev + 1: x + 1] if x > prev else series.c[:0]
        re_parts.append(math.fsum(seg.real))
        im_parts.append(math.fsum(seg.imag))
        S[idx] = complex(math.fsum(re_parts), math.fsum(im_parts))
        prev = max(prev, x)
    return WeylSeries(grid.copy(), S)


# --- predictions and fits ------------------------------------------------------------

def predict_main_terms(family, gamma: float, X, irreducible: bool = False, corrected: bool = False):
    """sum over poles of residue * X^pole / pole (Perron leading terms)."""
    X = np.asarray(X, dtype=float)
    poles = IRREDUCIBLE_POLES if irreducible else POLES
    out = np.zeros(X.shape, dtype=complex)
    for p in poles:
        s = pole_location(p, gamma)
        out = out + residue(family, p, gamma, corrected) * X ** s / s
    return out


def model_exponents(gamma: float, poles=POLES) -> list:
    return [pole_location(p, gamma) for p in poles]


@dataclass(frozen=True)
class FitReport:
    model_poles: list
    amplitudes: list
    residual: float
    free_slope: float
    free_intercept: float


def fit_asymptotics(X, S, exponents) -> FitReport:
    """Least squares S(X) ~ sum_j A_j X^{s_j} with fixed s_j, plus a free slope of log|S|."""
    X = np.asarray(X, dtype=float)
    S = np.asarray(S, dtype=complex)
    if X.size < 20:
        raise ValueError("need at least 20 grid points")
    if X.min() <= 0 or X.max() / X.min() < 100 * (1 - 1e-9):
        raise ValueError("grid must span at least two decades")
    exps = [complex(s) for s in exponents]
    x0 = math.sqrt(X.min() * X.max())
    # columns scaled at the grid's geometric centre for conditioning
    A = np.column_stack([(X / x0) ** s for s in exps])
    if np.linalg.matrix_rank(A) < len(exps):
        raise ValueError("degenerate design matrix")
    coef, *_ = np.linalg.lstsq(A, S, rcond=None)
    amps = [complex(c * x0 ** (-s)) for c, s in zip(coef, exps)]
    resid = float(np.linalg.norm(A @ coef - S) / max(np.linalg.norm(S), 1e-300))
    ok = np.abs(S) > 0
    if ok.sum() < 2:
        slope, icpt = float("nan"), float("nan")
    else:
        slope, icpt = np.polyfit(np.log(X[ok]), np.log(np.abs(S[ok])), 1)
    return FitReport(exps, amps, resid, float(slope), float(icpt))


def free_slope(X, S) -> float:
    X = np.asarray(X, dtype=float)
    S = np.asarray(S, dtype=complex)
    ok = np.abs(S) > 0
    return float(np.polyfit(np.log(X[ok]), np.log(np.abs(S[ok])), 1)[0])


def oscillation_projection(X, S, omega: float, power: float = 1.25) -> float:
    """max over +-omega of |mean of S X^-power e^{-+ i omega ln X}| on the grid."""
    X = np.asarray(X, dtype=float)
    w = np.asarray(S, dtype=complex) * X ** (-power)
    L = np.log(X)
    return float(max(abs(np.mean(w * np.exp(-1j * omega * L))),
                      abs(np.mean(w * np.exp(1j * omega * L)))))
