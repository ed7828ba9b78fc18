"""Acceptance criteria, one test per criterion.

Each test prints a single pass/fail line (visible with ``pytest -s`` or
``-rP``) and enforces the stated tolerance and, where given, the runtime
budget.  Random draws use fixed seeds; sampling recipes are: deformation
entries uniform in [-2, 2], M uniform in (m1, mstar), R uniform in (0, 5)
unless a criterion states otherwise.
"""

from __future__ import annotations

import math
import time

import numpy as np

from conftest import random_admissible, random_frequency, random_with_verdict
from loplab import (
    ShockParameters,
    Stability,
    assemble_interior,
    assemble_system,
    boundary_kernel,
    boundary_residual,
    build_determinant,
    classify_closed_form,
    closed_form_determinant,
    derive,
    find_boundary_roots,
    full_dispersion_roots,
    lambda_plus,
    scan_interior_roots,
    transition_points,
)
from loplab.classify import conditions_mp, quartic_margin
from loplab.lopatinski import residual_scales


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"acceptance criterion {num} ({name}) failed: {detail}"


def test_criterion_1_gas_dynamics_reduction():
    start = time.perf_counter()
    n = 200
    machs = (np.arange(n) + 0.5) / n          # open (0, 1)
    ratios = 4.0 * (np.arange(n) + 0.5) / n   # open (0, 4)
    disagreements = 0
    for mach in machs:
        msq = mach * mach
        for ratio in ratios:
            verdict = classify_closed_form(derive(ShockParameters(float(mach), float(ratio))))
            gas_uniform = msq * (ratio - 1.0) < 1.0
            if (verdict.verdict is Stability.UNIFORM) != gas_uniform:
                disagreements += 1
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and elapsed < 5.0
    _report(1, "gas-dynamics reduction", ok,
            f"{disagreements} disagreements on {n}x{n} grid, {elapsed:.2f}s < 5s")


def test_criterion_2_condition_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    n = 100_000
    f = rng.uniform(-2.0, 2.0, size=(n, 4))
    u = rng.uniform(0.0, 1.0, size=n)
    ratios = rng.uniform(0.0, 5.0, size=n)
    disagreements = 0
    resolved_near_threshold = 0
    for i in range(n):
        m1 = math.hypot(f[i, 0], f[i, 1])
        mstar = math.sqrt(1.0 + m1 * m1)
        mach = m1 + u[i] * (mstar - m1)
        if not (m1 < mach < mstar) or ratios[i] <= 0.0:
            continue  # zero-probability endpoint draws
        d = derive(ShockParameters(mach, ratios[i], f[i, 0], f[i, 1], f[i, 2], f[i, 3]))
        threshold_flag = d.k < d.k1 + d.k2
        quartic_flag = quartic_margin(d) > 0.0
        if threshold_flag != quartic_flag:
            margin_mp, quartic_mp, _ = conditions_mp(d)
            if (margin_mp > 0) != (quartic_mp > 0) and abs(margin_mp) > 1e-12:
                disagreements += 1
            else:
                resolved_near_threshold += 1
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and elapsed < 30.0
    _report(2, "condition equivalence", ok,
            f"{disagreements} disagreements / {n} samples "
            f"({resolved_near_threshold} resolved near threshold), {elapsed:.1f}s < 30s")


def test_criterion_3_determinant_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        d = derive(random_admissible(rng))
        mats = assemble_system(d)
        s, omega = random_frequency(rng)
        lam = lambda_plus(d, s, omega)
        kern = boundary_kernel(d, None, s, omega)
        generic = build_determinant(mats, kern, s, omega, lam).det
        closed = closed_form_determinant(d, None, s, omega, lam)
        worst = max(worst, abs(generic - closed) / max(abs(generic), abs(closed), 1e-300))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10.0
    _report(3, "determinant equivalence", ok,
            f"max rel err {worst:.2e} <= 1e-10 over 1000 points, {elapsed:.1f}s < 10s")


def test_criterion_4_kernel_residual():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(1000):
        d = derive(random_admissible(rng))
        mats = assemble_system(d)
        s, omega = random_frequency(rng)
        kern = boundary_kernel(d, None, s, omega)
        worst = max(worst, boundary_residual(mats, kern, s, omega))
    ok = worst <= 1e-12
    _report(4, "kernel residual", ok, f"max rel residual {worst:.2e} <= 1e-12 over 1000 points")


def test_criterion_5_hersh_uniqueness():
    rng = np.random.default_rng(5)
    worst = 0.0
    count_ok = True
    for _ in range(1000):
        d = derive(random_admissible(rng))
        s, omega = random_frequency(rng)
        roots = full_dispersion_roots(d, None, s, omega)
        positive = roots[roots.real > 0]
        if len(positive) != 1:
            count_ok = False
            break
        lam = lambda_plus(d, s, omega)
        worst = max(worst, abs(lam - positive[0]) / (1.0 + abs(lam)))
    ok = count_ok and worst <= 1e-9
    _report(5, "Hersh uniqueness", ok,
            f"unique decaying root at all points: {count_ok}, max mismatch {worst:.2e} <= 1e-9")


def test_criterion_6_no_violent_instability():
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    total_roots = 0
    for i in range(20):
        params = random_with_verdict(rng, weak=(i % 2 == 0))
        d = derive(params)
        roots = scan_interior_roots(d, eta_min=1e-4, eta_max=10.0, xi_max=10.0, grid=(400, 800))
        total_roots += len(roots)
    elapsed = time.perf_counter() - start
    ok = total_roots == 0 and elapsed < 120.0
    _report(6, "no violent instability", ok,
            f"{total_roots} interior roots over 20 parameter sets "
            f"(400x800 grid + Newton), {elapsed:.1f}s < 120s")


def test_criterion_7_weak_stability_roots():
    rng = np.random.default_rng(7)
    ok = True
    detail = ""
    for _ in range(20):
        d = derive(random_with_verdict(rng, weak=True))
        roots = find_boundary_roots(d)
        tp = transition_points(d)
        if not roots:
            ok, detail = False, "missing root at a weak point"
            break
        record = roots[0]
        scale_disp, scale_det = residual_scales(d, record.s, 1.0, record.lam)
        target = (d.k2 - d.k) / d.beta**2
        if abs(record.residual_dispersion) > 1e-8 * scale_disp:
            ok, detail = False, "dispersion residual too large"
            break
        if abs(record.residual_determinant) > 1e-8 * scale_det:
            ok, detail = False, "determinant residual too large"
            break
        if abs(record.lam**2 - target) > 1e-8 * (abs(record.lam) ** 2 + abs(target)):
            ok, detail = False, "root violates the subtraction identity"
            break
        if record.s.imag < tp.xi_star_plus - 1e-9 * (1.0 + abs(tp.xi_star_plus)):
            ok, detail = False, "recovered xi below the + transition point"
            break
    if ok:
        for _ in range(20):
            d = derive(random_with_verdict(rng, weak=False))
            if find_boundary_roots(d):
                ok, detail = False, "spurious root at a uniformly stable point"
                break
    _report(7, "weak-stability roots", ok, detail or
            "20 weak sets all carry validated roots; 20 uniform sets carry none")


def test_criterion_8_transition_fidelity():
    rng = np.random.default_rng(8)
    worst_quad = 0.0
    worst_delta = 0.0
    for _ in range(300):
        d = derive(random_admissible(rng))
        tp = transition_points(d)
        l0 = abs(d.ell0)
        msq = d.mach**2
        for xi in (tp.xi_star_plus, tp.xi_star_minus):
            quad = msq * d.mstar**2 * xi**2 - 2.0 * l0 * msq * xi + l0**2 - d.k2 * d.beta**2
            worst_quad = max(worst_quad, abs(quad))
        worst_delta = max(
            worst_delta,
            abs(tp.delta_star_plus * d.beta - math.sqrt(d.k1)) / (1.0 + math.sqrt(d.k1)),
            abs(tp.delta_star_minus * d.beta + math.sqrt(d.k3)) / (1.0 + math.sqrt(d.k3)),
        )

    # Numerical root-existence predicate vs the closed-form threshold in R.
    def has_root(ratio: float) -> bool:
        d = derive(ShockParameters.from_matrix(1.0, ratio, np.diag([0.5, 0.5])))
        return len(find_boundary_roots(d)) > 0

    lo, hi = 1.0, 4.0
    assert not has_root(lo) and has_root(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if has_root(mid):
            hi = mid
        else:
            lo = mid
    r_bisect = 0.5 * (lo + hi)
    r_closed = 8.0 / 3.0  # k = 0.75 R + 0.25 meets k1 + k2 = 2.25
    bisect_err = abs(r_bisect - r_closed)

    ok = worst_quad <= 1e-12 and worst_delta <= 1e-12 and bisect_err <= 1e-6
    _report(8, "transition fidelity", ok,
            f"quadratic residual {worst_quad:.2e} <= 1e-12, "
            f"delta identities {worst_delta:.2e} <= 1e-12, "
            f"R threshold bisection error {bisect_err:.2e} <= 1e-6")


def test_criterion_9_positivity_suite():
    rng = np.random.default_rng(9)
    dstab_ok = True
    signature_ok = True
    for _ in range(10_000):
        d = derive(random_admissible(rng))
        if not d.dstab > 0.0:
            dstab_ok = False
            break
        _, a1, _ = assemble_interior(d)
        eigs = np.linalg.eigvalsh(a1)
        if np.sum(eigs < 0) != 1 or np.sum(eigs > 0) != 6:
            signature_ok = False
            break
    ok = dstab_ok and signature_ok
    _report(9, "positivity suite", ok,
            f"dstab > 0: {dstab_ok}, boundary-matrix signature (1,6): {signature_ok} "
            "over 10000 samples")
