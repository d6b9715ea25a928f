"""Named verification suites: lists of check records with a pass flag.

Each record is a dict {check, params, lhs, rhs, rel_err, tol, passed};
`verify --suite NAME` prints them and exits nonzero if any record fails.
"""

from __future__ import annotations

import math

import numpy as np

from . import lemmas
from .cache import jsonable
from .cubic_forms import act, discriminant, is_irreducible
from .eisenstein import EisensteinSeries, functional_equation_defect, laplacian_defect
from .enumeration import compare_with_oracle
from .shapes import (
    fundamental_domain_reduce, moebius, same_point_mod_gamma, shape_point,
    solution_point, solve_group_element,
)
from .specfun import check_mellin_identities

SUITES = ("eigenvalue", "sigma2", "sigma3", "phi0", "scaling", "mellin", "eisenstein", "shapes", "enumeration")


def record(check, params, lhs, rhs, rel_err, tol) -> dict:
    rel_err = float(rel_err)
    return jsonable({"check": check, "params": params, "lhs": lhs, "rhs": rhs, "rel_err": rel_err,
                     "tol": tol, "passed": bool(np.isfinite(rel_err) and rel_err <= tol)})


def from_report(rep: lemmas.VerificationReport, tol=None) -> dict:
    out = record(rep.lemma, rep.params, complex(rep.lhs), complex(rep.rhs), rep.rel_err,
                 rep.tol if tol is None else tol)
    if rep.budget:
        out["budget"] = jsonable(rep.budget)
    return out


def suite_eigenvalue(tol=None):
    return [from_report(lemmas.verify_eigenvalue(z), tol) for z in (0, 1j, 0.5)]


SIGMA2_SAMPLES = ((0.5, -1), (0.25, -1), (0.75, -1), (0.5, 1), (0.25, 1), (0.75, 1))


def suite_sigma2(tol=None):
    out = [from_report(lemmas.verify_sigma2(z, s), tol) for z, s in SIGMA2_SAMPLES]
    out += [from_report(lemmas.verify_sigma2(z, s, corrected=True), tol) for z, s in SIGMA2_SAMPLES]
    for z in (0.25, 0.5, 0.75):
        for corrected in (False, True):
            lhs = lemmas.sigma2_closed_form(z, 1, corrected) / lemmas.sigma2_closed_form(z, -1, corrected)
            rhs = 3 ** (3 * z / 4 - 1)
            out.append(record("sigma2_sign_ratio", {"z": z, "corrected": corrected}, lhs, rhs,
                              lemmas.rel_err(lhs, rhs), lemmas.TOLERANCES["sigma2"] if tol is None else tol))
    return out


def suite_phi0(tol=None):
    out = [from_report(lemmas.verify_phi0(s, sg), tol) for sg in (-1, 1) for s in (2.0, 0.0, 1.0)]
    out += [from_report(lemmas.verify_phi0_ratio(s), tol) for s in (2.0, 0.0, 1.0)]
    return out


def suite_sigma3(tol=None):
    out = [from_report(lemmas.verify_sigma3(0.5, sg), tol) for sg in (-1, 1)]
    out += [from_report(lemmas.verify_sigma3_scaling(0.5, sg, 2.0), tol) for sg in (-1, 1)]
    return out


def suite_scaling(tol=None):
    return [
        from_report(lemmas.verify_sigma2_scaling(0.5, 1.0), tol),
        from_report(lemmas.verify_sigma2_scaling(0.5, 2.0), tol),
        from_report(lemmas.verify_fourier_scaling(1.0 / 3.0), tol),
    ]


def suite_mellin(tol=None):
    out = []
    for r in check_mellin_identities():
        t = r["tol"] if tol is None else tol
        out.append(record(f"mellin_{r['identity']}", {"sample": r["sample"]}, r["lhs"], r["rhs"], r["rel_err"], t))
    return out


EIS_SAMPLES = [(g, complex(x, y)) for g in (0.5, 1.0, 3.7, 9.2) for x, y in
               ((0.0, 1.0), (0.3, 0.9), (-0.45, 1.7), (0.1, 3.2), (0.49, 0.87))]
MODULAR = (((1, 1), (0, 1)), ((0, -1), (1, 0)), ((2, 1), (1, 1)), ((3, -2), (-4, 3)), ((5, 2), (7, 3)))


def automorphy_defect(gamma: float, tau: complex, tol: float = 1e-12) -> float:
    """Largest |E(M tau) - E(tau)| / |E(tau)| over a few modular matrices."""
    E = EisensteinSeries(gamma, tol, use_table=False)
    base = E(tau).value
    return max(abs(E(moebius(M, tau)).value - base) / abs(base) for M in MODULAR)


def suite_eisenstein(tol=None):
    out = []
    for g, tau in EIS_SAMPLES:
        d = functional_equation_defect(g, tau)
        out.append(record("eisenstein_functional_equation", {"gamma": g, "tau": tau}, d, 0.0, d,
                          1e-8 if tol is None else tol))
    for g, tau in EIS_SAMPLES[:8]:
        d = automorphy_defect(g, tau)
        out.append(record("eisenstein_automorphy", {"gamma": g, "tau": tau}, d, 0.0, d,
                          1e-8 if tol is None else tol))
    for g, tau in ((1.0, 1.1j + 0.2), (3.7, 0.9j - 0.3)):
        d1, d2 = laplacian_defect(g, tau, 1e-3), laplacian_defect(g, tau, 5e-4)
        out.append(record("eisenstein_laplacian", {"gamma": g, "tau": tau, "h": 1e-3}, d1, 0.0, d1,
                          1e-4 if tol is None else tol))
        # halving h must cut the defect by about 4
        out.append(record("eisenstein_laplacian_h2", {"gamma": g, "tau": tau}, d1 / d2, 4.0,
                          abs(d1 / d2 - 4.0) / 4.0, 0.1))
    return out


def random_irreducible_forms(n: int, seed: int = 0, box: int = 30) -> list:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        f = tuple(int(v) for v in rng.integers(-box, box + 1, 4))
        if f[0] != 0 and discriminant(f) != 0 and is_irreducible(f):
            out.append(f)
    return out


def shape_consistency(f) -> float:
    """Distance mod SL2(Z) between the lattice shape and N_h(tau0) from the group solve."""
    sign = 1 if discriminant(f) > 0 else -1
    sol = solve_group_element(f, sign)
    p = fundamental_domain_reduce(solution_point(sol, sign))[0].tau
    q = shape_point(f).tau
    for tol in (1e-12, 1e-9, 1e-6, 1e-3, 1e-1):
        if same_point_mod_gamma(p, q, tol):
            return tol
    return math.inf


def suite_shapes(tol=None, n: int = 1000):
    out = []
    hexagonal = complex(-0.5, math.sqrt(3) / 2)
    for f in ((1, 1, -2, -1), (0, 1, 1, 0)):
        p = shape_point(f).tau
        out.append(record("shape_hexagonal", {"form": f}, p, hexagonal, abs(p - hexagonal),
                          1e-6 if tol is None else tol))
    worst = max(shape_consistency(f) for f in random_irreducible_forms(n))
    out.append(record("shape_lattice_vs_group", {"forms": n}, worst, 0.0, worst, 1e-6 if tol is None else tol))
    # class invariance of the shape under a unimodular change of variables
    f = (1, 2, -3, 5)
    g = act(((2, 1), (1, 1)), f)
    p, q = shape_point(f).tau, shape_point(g).tau
    out.append(record("shape_class_invariance", {"form": f}, p, q, abs(p - q), 1e-9 if tol is None else tol))
    return out


def suite_enumeration(tol=None, X: int = 2000):
    out = []
    for sign in (-1, 1):
        r = compare_with_oracle(sign, X)
        bad = len(r["problems"]) + r["missing"] + abs(r["enumerated"] - r["oracle"])
        out.append(record("enumeration_oracle", {"sign": sign, "max_disc": X}, r["enumerated"], r["oracle"],
                          float(bad), 0.0))
    return out


def run_suite(name: str, tol=None) -> list:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return globals()[f"suite_{name}"](tol)
