from __future__ import annotations

import numpy as np
import pytest

from loplab import ShockParameters, derive


def random_admissible(rng: np.random.Generator, fmax: float = 2.0, r_max: float = 5.0) -> ShockParameters:
    """Random downstream-Lax-admissible parameters: deformation entries
    uniform in [-fmax, fmax], M uniform in (m1, mstar), R in (0, r_max)."""
    while True:
        f = rng.uniform(-fmax, fmax, size=4)
        m1 = float(np.hypot(f[0], f[1]))
        mstar = float(np.sqrt(1.0 + m1 * m1))
        mach = float(rng.uniform(m1, mstar))
        ratio = float(rng.uniform(0.0, r_max))
        if m1 < mach < mstar and ratio > 0.0:
            return ShockParameters(mach, ratio, f[0], f[1], f[2], f[3])


def random_with_verdict(rng: np.random.Generator, weak: bool, fmax: float = 2.0) -> ShockParameters:
    """Random admissible parameters forced to the weak (k >= k1+k2) or the
    uniform (k < k1+k2) side by placing R against the stability threshold.
    k1 and k2 do not depend on R, so the forcing is exact."""
    p = random_admissible(rng, fmax)
    d = derive(p)
    r_threshold = (d.k1 + d.k2 - d.m2**2) / d.mtilde_sq
    if weak:
        ratio = r_threshold * float(rng.uniform(1.0 + 1e-6, 2.0))
    else:
        ratio = r_threshold * float(rng.uniform(0.05, 1.0 - 1e-6))
    return ShockParameters(p.mach, ratio, p.f11, p.f12, p.f21, p.f22)


def random_frequency(rng: np.random.Generator) -> tuple[complex, float]:
    """Random Laplace-Fourier point with eta > 0."""
    s = complex(rng.uniform(0.01, 2.0), rng.uniform(-4.0, 4.0))
    omega = float(rng.uniform(-3.0, 3.0))
    return s, omega


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
