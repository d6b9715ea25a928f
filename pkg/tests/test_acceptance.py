"""Acceptance criteria 1-9, each at its stated tolerance and runtime budget.

Every test appends one PASS/FAIL line, shown in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from shintani import lemmas as L
from shintani.cubic_forms import base_point, discriminant, hessian
from shintani.enumeration import check_singular_bijection, compare_with_oracle, enumerate_table
from shintani.shapes import cusp_barrier, solve_group_element
from shintani.specfun import bessel_k, check_mellin_identities, xi
from shintani.spectral_zeta import (
    POLES, fit_asymptotics, free_slope, mirror_defect, model_exponents, oscillation_projection,
    pole_location, residue,
)
from shintani.suites import (
    from_report, suite_eigenvalue, suite_eisenstein, suite_phi0, suite_scaling, suite_sigma3, suite_shapes,
)

GAMMA = 1.0


def conclude(log, name, ok, detail, t0=None, budget=None):
    if t0 is not None:
        dt = time.perf_counter() - t0
        detail = f"{detail}; {dt:.1f} s (budget {budget} s)"
        ok = ok and dt < budget
    log.append(f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}")
    assert ok, detail


def failed(records):
    return [f"{r['check']} {r['params']} rel_err={r['rel_err']:.3g} tol={r['tol']:g}"
            for r in records if not r["passed"]]


def test_criterion_1_exact_arithmetic(acceptance_log):
    t0 = time.perf_counter()
    bad = []
    if abs(discriminant(base_point(1)) - 1) > 1e-12 or abs(discriminant(base_point(-1)) + 1) > 1e-12:
        bad.append("base point discriminants")
    if discriminant((1, 0, -1, -1)) != -23 or discriminant((1, 1, -2, -1)) != 49:
        bad.append("example discriminants")
    rng = np.random.default_rng(1)
    for f in rng.integers(-1000, 1001, (10 ** 4, 4)).tolist():
        A, B, C = hessian(f)
        if B * B - 4 * A * C != -3 * discriminant(f):
            bad.append(f"hessian {f}")
            break
    conclude(acceptance_log, "1", not bad, ", ".join(bad) or "exact identities hold", t0, 1)


def test_criterion_2_enumeration_matches_oracle(acceptance_log):
    t0 = time.perf_counter()
    notes = []
    for sign in (-1, 1):
        r = compare_with_oracle(sign, 5000)
        notes.append(f"sign {sign:+d}: {r['enumerated']} classes vs oracle {r['oracle']}, "
                     f"{len(r['problems'])} problems, {r['missing']} missing")
        ok = not r["problems"] and not r["missing"] and r["enumerated"] == r["oracle"]
        if not ok:
            break
    conclude(acceptance_log, "2", ok, "; ".join(notes), t0, 300)


def test_criterion_3_singular_bijection(acceptance_log):
    t0 = time.perf_counter()
    r = check_singular_bijection(50)
    ok = not r["cubic_errors"] and not r["quadratic_errors"]
    detail = (f"cubic {r['cubic_counts']}, quadratic {r['quadratic_counts']}, "
              f"{len(r['cubic_errors']) + len(r['quadratic_errors'])} errors")
    conclude(acceptance_log, "3", ok, detail, t0, 60)


def test_criterion_4_special_functions(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    zs = rng.uniform(-8, 9, 100) + 1j * rng.uniform(-40, 40, 100)
    xi_err = max(abs(xi(z).value - xi(1 - z).value) for z in zs)
    mellin = check_mellin_identities()
    bad = failed([dict(r, check=r["identity"], params=r["sample"], passed=r["rel_err"] <= r["tol"])
                  for r in mellin])
    k_imag = max(abs(complex(bessel_k(1j * nu, x).value).imag)
                 for nu, x in zip(rng.uniform(0, 20, 200), rng.uniform(0.05, 30, 200)))
    ok = xi_err <= 1e-9 and not bad and k_imag <= 1e-12
    detail = f"xi defect {xi_err:.2g}, mellin failures {bad or 'none'}, max Im K_(i nu) {k_imag:.2g}"
    conclude(acceptance_log, "4", ok, detail, t0, 60)


def test_criterion_5_eisenstein(acceptance_log):
    t0 = time.perf_counter()
    recs = suite_eisenstein()
    n_fe = sum(r["check"] == "eisenstein_functional_equation" for r in recs)
    bad = failed(recs)
    conclude(acceptance_log, "5", not bad and n_fe >= 20,
             f"{len(recs)} checks ({n_fe} functional-equation samples), failures: {bad or 'none'}", t0, 120)


def test_criterion_6_lemma_quadrature(acceptance_log):
    t0 = time.perf_counter()
    recs = suite_eigenvalue()
    # Sigma_2 against the closed form as printed, both signs, plus the sign ratio
    for sign in (-1, 1):
        for z in (0.25, 0.5, 0.75):
            recs.append(from_report(L.verify_sigma2(z, sign)))
    for z in (0.25, 0.5, 0.75):
        lhs = L.sigma2_closed_form(z, 1) / L.sigma2_closed_form(z, -1)
        rhs = 3 ** (3 * z / 4 - 1)
        e = L.rel_err(lhs, rhs)
        recs.append({"check": "sigma2_sign_ratio", "params": {"z": z}, "rel_err": e, "tol": 1e-6,
                     "passed": e <= 1e-6})
    recs += suite_phi0() + suite_sigma3() + suite_scaling()
    bad = failed(recs)
    conclude(acceptance_log, "6", not bad, f"{len(recs)} checks, failures: {bad or 'none'}", t0, 900)


def test_criterion_7_residue_table(acceptance_log):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    gammas = rng.uniform(0.1, 30, 20)
    mirror = max(mirror_defect(f, g) for f in ("L-", "L+") for g in gammas)
    ratio_err = 0.0
    for g in gammas:
        z = 1j * g
        r5 = residue("L+", "(5+z)/4", g) / residue("L-", "(5+z)/4", g)
        r11 = residue("L+", "(11+z)/12", g) / residue("L-", "(11+z)/12", g)
        ratio_err = max(ratio_err, abs(r5 / 3 ** ((1 + z) / 4) - 1), abs(r11 / 3 ** ((z - 3) / 4) - 1))
    ok = mirror <= 1e-10 and ratio_err <= 1e-13
    conclude(acceptance_log, "7", ok, f"mirror defect {mirror:.2g}, 3-power ratio defect {ratio_err:.2g}", t0, 1)


# --- criterion 8: gamma = 1, X = 1e6, 50-point geometric grid over [1e3, 1e6] -----------

def test_criterion_8a_full_slope(acceptance_log, weyl_data):
    X, S, _ = weyl_data[-1, False]
    s = free_slope(X, S)
    conclude(acceptance_log, "8a", 1.15 <= s <= 1.35, f"full L- slope {s:.4f}, required [1.15, 1.35]")


def test_criterion_8b_irreducible_slope(acceptance_log, weyl_data):
    full = free_slope(*weyl_data[-1, False][:2])
    irr = free_slope(*weyl_data[-1, True][:2])
    ok = 0.77 <= irr <= 1.02 and irr <= full - 0.2
    conclude(acceptance_log, "8b", ok,
             f"irreducible L- slope {irr:.4f}, required [0.77, 1.02]; full {full:.4f}, gap {full - irr:.3f}")


def test_criterion_8c_oscillation(acceptance_log, weyl_data):
    X, S, _ = weyl_data[-1, False]
    main = oscillation_projection(X, S, GAMMA / 4)
    others = {w: oscillation_projection(X, S, GAMMA * w) for w in (1 / 8, 1 / 2, 1)}
    ratio = main / max(others.values())
    conclude(acceptance_log, "8c", ratio >= 2,
             f"projection at gamma/4 over the largest of gamma/8, gamma/2, gamma: {ratio:.3f}, required >= 2")


def test_criterion_8d_leading_amplitude(acceptance_log, weyl_data):
    X, S, _ = weyl_data[-1, False]
    fr = fit_asymptotics(X, S, model_exponents(GAMMA))
    ratios = [abs(a) / abs(residue("L-", p, GAMMA) / pole_location(p, GAMMA))
              for p, a in zip(POLES[:2], fr.amplitudes[:2])]
    ok = all(abs(r - 1) <= 0.25 for r in ratios)
    conclude(acceptance_log, "8d", ok,
             "fitted |amplitude| / |residue/pole| at (5+z)/4, (5-z)/4: "
             + ", ".join(f"{r:.4f}" for r in ratios) + ", required within 25% of 1")


def test_criterion_9_shapes(acceptance_log):
    t0 = time.perf_counter()
    bad = failed(suite_shapes())
    worst, n = 0.0, 0
    for sign in (-1, 1):
        t = enumerate_table(sign, 10 ** 4)
        for f, d in zip(t.reps, t.disc):
            if f[0] != 0:
                s = solve_group_element(tuple(int(v) for v in f), sign)
                worst = max(worst, cusp_barrier(int(d), sign) / s.t)
                n += 1
    ok = not bad and worst <= 1
    conclude(acceptance_log, "9", ok,
             f"shape failures: {bad or 'none'}; cusp barrier on {n} classes, max c0 d^(-1/12) / t = {worst:.7f}",
             t0, 120)
