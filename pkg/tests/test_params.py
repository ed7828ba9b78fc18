from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import random_admissible
from loplab import (
    NonHyperbolicPoint,
    ShockParameters,
    check_lax,
    derive,
)
from loplab.params import deformation_determinant_mismatch


def test_gas_limit_values():
    # All elastic terms vanish; k reduces to R*M^2.
    d = derive(ShockParameters(mach=0.8, ratio=1.2))
    assert d.m1 == 0.0 and d.m2 == 0.0
    assert d.mstar == 1.0
    assert d.beta == pytest.approx(0.6, rel=1e-15)
    assert d.ell0 == 0.0
    assert d.sigma == 1.0
    assert d.k == pytest.approx(0.768, rel=1e-15)
    assert d.k1 == pytest.approx(0.64, rel=1e-15)
    assert d.k2 == 1.0
    assert d.k3 == pytest.approx(0.64, rel=1e-15)


def test_diagonal_deformation_values():
    # Hand evaluation of every definitional formula at M=1, R=3, F=diag(.5,.5).
    d = derive(ShockParameters.from_matrix(1.0, 3.0, np.diag([0.5, 0.5])))
    assert d.m1 == 0.5 and d.m2 == 0.5
    assert d.mstar**2 == pytest.approx(1.25, rel=1e-15)
    assert d.beta == pytest.approx(0.5, rel=1e-15)
    assert d.ell0 == 0.0
    assert d.detf == pytest.approx(0.25, rel=1e-15)
    assert d.sigma == pytest.approx(1.25, rel=1e-15)
    assert d.k == pytest.approx(2.5, rel=1e-15)
    assert d.k1 == pytest.approx(1.0, rel=1e-14)
    assert d.k2 == pytest.approx(1.25, rel=1e-15)
    assert d.k3 == pytest.approx(1.0, rel=1e-14)


def test_general_deformation_values():
    # M=1, R=2, F=[[0.6,0.3],[0.2,0.4]]; frozen values recomputed at 30
    # digits from the definitions, and k1 cross-checked through the merged
    # transition root identity (delta*+)^2 * beta^2 = k1.
    d = derive(ShockParameters(1.0, 2.0, 0.6, 0.3, 0.2, 0.4))
    assert d.ell0 == pytest.approx(0.24, rel=1e-15)
    assert d.m1**2 == pytest.approx(0.45, rel=1e-14)
    assert d.m2**2 == pytest.approx(0.20, rel=1e-14)
    assert d.mstar**2 == pytest.approx(1.45, rel=1e-15)
    assert d.detf == pytest.approx(0.18, rel=1e-15)
    assert d.sigma == pytest.approx(1.2970736293672769, rel=1e-15)
    assert d.k1 == pytest.approx(0.61387412498425008, rel=1e-14)
    assert d.k2 == pytest.approx(1.2, rel=1e-15)
    assert d.k == pytest.approx(1.3, rel=1e-15)
    xi_plus = (d.mach * abs(d.ell0) + d.beta * d.sigma) / (d.mach * d.mstar**2)
    delta_plus = (d.mach**2 * xi_plus - abs(d.ell0)) / d.beta**2
    assert delta_plus**2 * d.beta**2 == pytest.approx(d.k1, rel=1e-12)


def test_sigma_identity(rng):
    # The two closed forms of sigma agree identically.
    for _ in range(2000):
        d = derive(random_admissible(rng))
        other = math.sqrt(d.mstar**2 * (1.0 + d.m2**2) - d.ell0**2)
        assert other == pytest.approx(d.sigma, rel=1e-12)


def test_k1_written_form_is_exact(rng):
    for _ in range(2000):
        d = derive(random_admissible(rng))
        core = (d.mach * d.sigma - abs(d.ell0) * d.beta) ** 2
        assert d.k1 * d.mstar**4 == pytest.approx(core, rel=1e-14)


def test_k3_dominates_k1(rng):
    for _ in range(1000):
        d = derive(random_admissible(rng))
        assert d.k3 >= d.k1
        if d.ell0 != 0.0:
            assert d.k3 > d.k1
    d = derive(ShockParameters.from_matrix(1.0, 3.0, np.diag([0.5, 0.5])))
    assert d.ell0 == 0.0 and d.k3 == d.k1


def test_admissible_invariants(rng):
    for _ in range(2000):
        d = derive(random_admissible(rng))
        assert d.beta > 0.0
        assert 0.0 < d.mtilde < 1.0
        assert d.k > 0.0 and d.k1 > 0.0 and d.k2 >= 1.0
        assert d.dstab > 0.0
        assert (d.mach * d.sigma) ** 2 - d.ell0**2 * d.beta**2 > 0.0


def test_gas_reduction_condition(rng):
    # F = 0 collapses the threshold condition to M^2 (R-1) < 1.
    for _ in range(500):
        mach = float(rng.uniform(0.05, 0.999))
        ratio = float(rng.uniform(0.05, 4.0))
        d = derive(ShockParameters(mach, ratio))
        assert d.k == pytest.approx(ratio * mach**2, rel=1e-15)
        assert d.k1 == pytest.approx(mach**2, rel=1e-14)
        assert d.k2 == 1.0
        assert (d.k < d.k1 + d.k2) == (mach**2 * (ratio - 1.0) < 1.0)


def test_nonhyperbolic_raises():
    with pytest.raises(NonHyperbolicPoint):
        derive(ShockParameters(1.5, 2.0))  # mstar = 1 < M
    with pytest.raises(NonHyperbolicPoint):
        derive(ShockParameters(1.0, 2.0))  # M = mstar exactly
    # Below m1 is fine to derive (mtilde is NaN) but not admissible.
    d = derive(ShockParameters(0.4, 2.0, 0.5, 0.0, 0.0, 0.5))
    assert math.isnan(d.mtilde)
    assert d.mtilde_sq < 0.0


def test_check_lax_examples():
    report = check_lax(ShockParameters.from_matrix(1.0, 2.0, np.diag([0.5, 0.5])))
    assert report.downstream_pass
    assert report.upstream_pass is None  # not checked
    assert report.lower_margin == pytest.approx(0.5)
    assert report.upper_margin == pytest.approx(math.sqrt(1.25) - 1.0)
    assert report.admissible

    report = check_lax(ShockParameters.from_matrix(0.4, 2.0, np.diag([0.5, 0.5])))
    assert not report.downstream_pass
    assert not report.admissible
    assert report.lower_margin < 0.0

    report = check_lax(ShockParameters(0.8, 1.2, mach_upstream=1.5))
    assert report.downstream_pass
    assert report.upstream_pass is True  # bound = 0.8/0.8 = 1 < 1.5
    assert report.upstream_bound == pytest.approx(1.0, rel=1e-15)
    assert report.upstream_margin == pytest.approx(0.5, rel=1e-12)

    report = check_lax(ShockParameters(0.8, 1.2, mach_upstream=0.9))
    assert report.upstream_pass is False
    assert not report.admissible


def test_parameter_validation():
    with pytest.raises(ValueError):
        ShockParameters(-1.0, 1.0)
    with pytest.raises(ValueError):
        ShockParameters(1.0, 0.0)
    with pytest.raises(ValueError):
        ShockParameters(math.nan, 1.0)
    with pytest.raises(ValueError):
        ShockParameters.from_matrix(1.0, 1.0, np.zeros((3, 3)))


def test_from_dict_nested_table():
    params = ShockParameters.from_dict(
        {"mach": 1.0, "ratio": 3.0, "f": {"f11": 0.5, "f22": 0.5}}
    )
    assert params.f11 == 0.5 and params.f22 == 0.5
    assert params.f12 == 0.0 and params.f21 == 0.0
    flat = ShockParameters.from_dict({"mach": 1.0, "ratio": 3.0, "f21": 0.25})
    assert flat.f21 == 0.25
    with pytest.raises(ValueError):
        ShockParameters.from_dict({"mach": 1.0})


def test_determinant_strict_mode():
    params = ShockParameters(1.0, 2.0, 0.6, 0.3, 0.2, 0.4)  # det F = 0.18
    assert deformation_determinant_mismatch(params, 0.18) is None
    mismatch = deformation_determinant_mismatch(params, 0.5)
    assert mismatch == pytest.approx(-0.32, rel=1e-12)
