"""Normal-mode dispersion relation and the decaying-root selector.

Normal modes ``exp(s t + i omega x2 + lambda x1)`` of the interior system
satisfy det(s*A0 + lambda*A1 + i*omega*A2) = 0, which factors as

    Omega^3 * (M^2 Omega^2 - sigma1^2 - sigma2^2)
            * (M^2 Omega^2 - sigma1^2 - sigma2^2 - lambda^2 + omega^2) = 0

with Omega = s + lambda, sigma1 = f11*lambda + i*omega*f21 and
sigma2 = f12*lambda + i*omega*f22 — a degree-7 polynomial in lambda.

For Re s > 0 exactly one of the seven roots lies in the open right
half-plane (Hersh's lemma; the boundary matrix A1 has a single negative
eigenvalue), and it is always a root of the last quadratic factor.  That
root, lambda_plus, is what the Lopatinski determinant is evaluated on.
The quadratic in reduced variables (|ell0|, with omega sign-flipped when
ell0 < 0) is

    beta^2 lambda^2 - 2 (M^2 s - i|ell0| omega) lambda - (M^2 s^2 + k2 omega^2) = 0

whose discriminant never vanishes for Re s > 0, so lambda_plus is analytic
there; on the boundary Re s = 0 it is defined as the one-sided limit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .params import DerivedQuantities

__all__ = [
    "FrequencyPoint",
    "NoRealBranch",
    "NO_REAL_BRANCH",
    "DegeneratePolynomial",
    "BranchAmbiguity",
    "dispersion_residual",
    "full_dispersion_roots",
    "hersh_candidates",
    "lambda_plus",
    "lambda_plus_limit",
    "delta_pm",
    "branch_radicand",
    "is_glancing",
]


class DegeneratePolynomial(ValueError):
    """A leading dispersion coefficient vanished (M = m1 or M = mstar);
    the root count would silently change, so this is always raised."""


class BranchAmbiguity(ArithmeticError):
    """Both closed-form root candidates have numerically vanishing real
    part at Re s > 0: the decaying branch cannot be resolved at this
    conditioning (not a mathematical case — perturb eta)."""


class NoRealBranch:
    """Sentinel: no purely imaginary roots exist at this (xi, omega)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:  # pragma: no cover
        return "NO_REAL_BRANCH"


NO_REAL_BRANCH = NoRealBranch()


@dataclass(frozen=True)
class FrequencyPoint:
    """A Laplace-Fourier point with a selected normal-mode root."""

    s: complex
    omega: float
    lam: complex
    omega_sum: complex  # s + lam
    sigma1: complex  # f11*lam + i*omega*f21
    sigma2: complex  # f12*lam + i*omega*f22

    @classmethod
    def make(cls, f: np.ndarray, s: complex, omega: float, lam: complex) -> "FrequencyPoint":
        f = np.asarray(f, dtype=float)
        return cls(
            s=complex(s),
            omega=float(omega),
            lam=complex(lam),
            omega_sum=complex(s) + complex(lam),
            sigma1=f[0, 0] * lam + 1j * omega * f[1, 0],
            sigma2=f[0, 1] * lam + 1j * omega * f[1, 1],
        )


def dispersion_residual(d: DerivedQuantities, f: np.ndarray | None, s, omega, lam):
    """Residual of the decaying-mode quadratic, M^2 Omega^2 - sigma1^2
    - sigma2^2 - lambda^2 + omega^2, computed from the deformation entries
    (not from the reduced rewriting — that identity is a test).  Accepts
    arrays for ``s``/``lam`` and broadcasts."""
    f = d.f if f is None else np.asarray(f, dtype=float)
    om = s + lam
    sigma1 = f[0, 0] * lam + 1j * omega * f[1, 0]
    sigma2 = f[0, 1] * lam + 1j * omega * f[1, 1]
    return d.mach**2 * om**2 - sigma1**2 - sigma2**2 - lam**2 + omega**2


def _dispersion_coefficients(
    d: DerivedQuantities, f: np.ndarray, s: complex, omega: float
) -> np.ndarray:
    lin = np.array([1.0, s], dtype=complex)
    cubic = np.convolve(np.convolve(lin, lin), lin)
    p1 = np.array([f[0, 0], 1j * omega * f[1, 0]], dtype=complex)
    p2 = np.array([f[0, 1], 1j * omega * f[1, 1]], dtype=complex)
    q1 = d.mach**2 * np.convolve(lin, lin) - np.convolve(p1, p1) - np.convolve(p2, p2)
    q2 = q1 + np.array([-1.0, 0.0, omega**2], dtype=complex)
    for q, name in ((q1, "shear factor"), (q2, "acoustic factor")):
        if abs(q[0]) <= 1e-12 * max(np.max(np.abs(q)), 1.0):
            raise DegeneratePolynomial(
                f"leading coefficient of the {name} vanished (coeff={q[0]}); "
                "root multiplicities would silently change"
            )
    return np.convolve(np.convolve(cubic, q1), q2)


def full_dispersion_roots(
    d: DerivedQuantities, f: np.ndarray | None, s: complex, omega: float
) -> np.ndarray:
    """All 7 roots (with multiplicity) of the dispersion polynomial in
    lambda, via companion-matrix eigenvalues plus Newton polishing.

    This path is independent of the closed-form root formulas and serves
    as their oracle.  Roots are returned sorted by (real, imag).
    """
    if s == 0 and omega == 0:
        raise ValueError("(s, omega) = (0, 0) is excluded")
    f = d.f if f is None else np.asarray(f, dtype=float)
    coeffs = _dispersion_coefficients(d, f, s, omega)
    roots = np.roots(coeffs)
    deriv = np.polyder(coeffs)
    abs_coeffs = np.abs(coeffs)
    powers = np.arange(len(coeffs) - 1, -1, -1)
    polished = []
    for root in roots:
        lam = root
        for _ in range(12):
            val = np.polyval(coeffs, lam)
            scale = float(np.sum(abs_coeffs * np.maximum(1.0, abs(lam)) ** powers))
            if abs(val) <= 1e-12 * scale:
                break
            dval = np.polyval(deriv, lam)
            if dval == 0:
                break
            lam = lam - val / dval
        polished.append(lam)
    out = np.array(polished, dtype=complex)
    return out[np.lexsort((out.imag, out.real))]


def _reduced_omega(d: DerivedQuantities, omega):
    """Map omega to the |ell0| form: flip its sign when ell0 < 0.  The
    root lambda is invariant under this relabeling."""
    return -omega if d.ell0 < 0 else omega


def hersh_candidates(d: DerivedQuantities, s, omega):
    """Both closed-form roots of the decaying-mode quadratic (vectorized).

    Returned as (plus_candidate, minus_candidate) using the principal
    square root; branch selection is the caller's job (for Re s > 0 the
    decaying root is simply the one with the larger real part).
    """
    wr = _reduced_omega(d, omega)
    l0 = abs(d.ell0)
    msq = d.mach**2
    beta_sq = d.beta**2
    disc = (
        msq * d.mstar**2 * np.asarray(s, dtype=complex) ** 2
        - 2j * l0 * msq * np.asarray(s, dtype=complex) * wr
        + (d.k2 * beta_sq - l0 * l0) * wr * wr
    )
    root = np.sqrt(disc)
    base = msq * np.asarray(s, dtype=complex) - 1j * l0 * wr
    return (base + root) / beta_sq, (base - root) / beta_sq


def branch_radicand(d: DerivedQuantities, xi: float, omega: float = 1.0) -> float:
    """Radicand whose sign separates purely imaginary root pairs (>= 0)
    from complex-conjugate-like pairs (< 0) on the boundary eta = 0.

    (xi, omega) are reduced variables (sign reduction already applied);
    the radicand vanishes exactly at the transition points."""
    l0 = abs(d.ell0)
    msq = d.mach**2
    return (
        msq * d.mstar**2 * xi * xi
        - 2.0 * l0 * msq * xi * omega
        + (l0 * l0 - d.k2 * d.beta**2) * omega * omega
    )


def _radicand_scale(d: DerivedQuantities, xi: float, omega: float) -> float:
    l0 = abs(d.ell0)
    msq = d.mach**2
    return (
        msq * d.mstar**2 * xi * xi
        + 2.0 * l0 * msq * abs(xi * omega)
        + abs(l0 * l0 - d.k2 * d.beta**2) * omega * omega
    )


def is_glancing(d: DerivedQuantities, xi: float, omega: float = 1.0, tol: float = 1e-12) -> bool:
    """True when the two decaying-branch roots merge at (i*xi, omega).
    (xi, omega) in original variables."""
    wr = _reduced_omega(d, omega)
    return abs(branch_radicand(d, xi, wr)) <= tol * max(_radicand_scale(d, xi, omega), 1e-300)


def lambda_plus(d: DerivedQuantities, s: complex, omega: float) -> complex:
    """The unique decaying root: Re lambda > 0 for Re s > 0, and the
    one-sided limit of that root for Re s = 0.

    For Re s > 0 both closed-form candidates are formed and the one with
    positive real part is returned; :class:`BranchAmbiguity` is raised if
    neither real part is numerically resolvable.  On the boundary the
    limit is evaluated analytically: where the radicand is negative the
    branch with positive real part survives, where it is positive the
    square-root sign is the sign of (mstar^2 xi - |ell0| omega), and at a
    merge point (glancing) the double root itself is returned.
    """
    s = complex(s)
    eta = s.real
    if eta < 0:
        raise ValueError("lambda_plus is defined for Re s >= 0")
    if s == 0 and omega == 0:
        raise ValueError("(s, omega) = (0, 0) is excluded")
    msq = d.mach**2
    beta_sq = d.beta**2
    if omega == 0:
        # 1D exact path: the quadratic factors through M*(s+lam) = ±mstar*lam.
        return d.mach * (d.mach + d.mstar) * s / beta_sq

    if eta > 0:
        cplus, cminus = hersh_candidates(d, s, omega)
        cplus = complex(cplus)
        cminus = complex(cminus)
        tol = 1e-12 * (1.0 + max(abs(cplus), abs(cminus)))
        if abs(cplus.real) < tol and abs(cminus.real) < tol:
            raise BranchAmbiguity(
                f"both root candidates have |Re| < {tol:.3e} at s={s}, omega={omega}"
            )
        return cplus if cplus.real >= cminus.real else cminus

    # eta == 0: one-sided limit.
    xi = s.imag
    wr = _reduced_omega(d, omega)
    l0 = abs(d.ell0)
    rad = branch_radicand(d, xi, wr)
    tol = 1e-12 * max(_radicand_scale(d, xi, omega), 1e-300)
    imag_base = msq * xi - l0 * wr
    if rad < -tol:
        return complex(math.sqrt(-rad), imag_base) / beta_sq
    if rad > tol:
        sign = math.copysign(1.0, d.mstar**2 * xi - l0 * wr)
        return 1j * (imag_base + sign * math.sqrt(rad)) / beta_sq
    # Glancing: merged roots; no distinguished branch is ascribed.
    return 1j * imag_base / beta_sq


def lambda_plus_limit(
    d: DerivedQuantities,
    xi: float,
    omega: float,
    eta0: float = 1e-4,
    levels: int = 7,
) -> complex:
    """lambda_plus(0, xi, omega) via an eta -> 0+ sequence with Richardson
    extrapolation (error expansion in powers of sqrt(eta), which covers the
    square-root behaviour at glancing points).  Cross-check path for the
    analytic limit in :func:`lambda_plus`."""
    scale = eta0 * max(1.0, abs(xi), abs(omega)) ** 2
    table = [
        [lambda_plus(d, complex(scale * 4.0 ** (-k), xi), omega)]
        for k in range(levels)
    ]
    for j in range(1, levels):
        fac = 2.0**j
        for k in range(j, levels):
            table[k].append((fac * table[k][j - 1] - table[k - 1][j - 1]) / (fac - 1.0))
    return table[levels - 1][levels - 1]


def delta_pm(
    d: DerivedQuantities, xi: float, omega: float = 1.0
) -> tuple[float, float] | NoRealBranch:
    """Imaginary parts (delta_plus, delta_minus) of the two purely
    imaginary roots on the boundary eta = 0.

    (xi, omega) are reduced variables: the sign reduction is assumed to be
    already applied, so this evaluates the |ell0| formulas verbatim.  Real
    branches exist exactly when the radicand is >= 0, i.e. for xi outside
    the open transition interval; otherwise NO_REAL_BRANCH.  Requires
    omega > 0 (normalize via homogeneity first).
    """
    if omega <= 0:
        raise ValueError("delta_pm requires omega > 0; use homogeneity to normalize")
    rad = branch_radicand(d, xi, omega)
    if rad < 0:
        return NO_REAL_BRANCH
    base = d.mach**2 * xi - abs(d.ell0) * omega
    root = math.sqrt(rad)
    return ((base + root) / d.beta**2, (base - root) / d.beta**2)
