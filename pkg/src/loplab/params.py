"""Unperturbed-shock parameters, derived scalars, and Lax admissibility.

The downstream state of a rectilinear shock is described by three
dimensionless quantities: the downstream Mach number ``M``, the density
ratio ``R`` (downstream over upstream), and the scaled 2x2 deformation
gradient ``F`` behind the shock.  Everything the stability analysis needs
is a scalar combination of these; :func:`derive` computes them all once,
and the rest of the package consumes the frozen :class:`DerivedQuantities`.

With ``m1, m2`` the norms of the first and second row of ``F``, the
derived scalars are::

    mstar  = sqrt(1 + m1^2)                     fast elastic Mach bound
    beta   = sqrt(mstar^2 - M^2)                requires M < mstar
    ell0   = f11*f21 + f12*f22                  off-diagonal of F F^T
    sigma  = sqrt(mstar^2 + m2^2 + det(F)^2)    = sqrt(mstar^2*(1+m2^2) - ell0^2)
    mtilde = sqrt(M^2 - m1^2)                   "elastic" Mach number
    k      = R*(M^2 - m1^2) + m2^2
    k1     = (M*sigma - |ell0|*beta)^2 / mstar^4
    k2     = 1 + m2^2
    k3     = (M*sigma + |ell0|*beta)^2 / mstar^4
    dstab  = (M*sigma - |ell0|*beta)^2 - mstar^4 * mtilde^2

The shock is a Lax 1-shock when ``m1 < M < mstar`` (downstream) and, if an
upstream Mach number is supplied, ``M_- > M / mtilde`` (upstream).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = [
    "ShockParameters",
    "DerivedQuantities",
    "AdmissibilityReport",
    "NonHyperbolicPoint",
    "derive",
    "check_lax",
    "deformation_determinant_mismatch",
]


class NonHyperbolicPoint(ValueError):
    """Raised when M >= mstar (beta^2 <= 0): the point is outside the
    hyperbolic range and no derived quantities are defined."""


@dataclass(frozen=True)
class ShockParameters:
    """Dimensionless downstream state of a rectilinear shock.

    Parameters
    ----------
    mach : float
        Downstream Mach number M > 0.
    ratio : float
        Density ratio R = rho_downstream / rho_upstream > 0.
    f11, f12, f21, f22 : float
        Entries of the scaled deformation gradient behind the shock.
    mach_upstream : float, optional
        Upstream Mach number M_-. Only used by the advisory upstream Lax
        check; classification does not require it.
    """

    mach: float
    ratio: float
    f11: float = 0.0
    f12: float = 0.0
    f21: float = 0.0
    f22: float = 0.0
    mach_upstream: float | None = None

    def __post_init__(self) -> None:
        # Coerce to plain floats so numpy scalars never leak downstream
        # (they break JSON serialization and `is True` identity checks).
        for name in ("mach", "ratio", "f11", "f12", "f21", "f22"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.mach_upstream is not None:
            object.__setattr__(self, "mach_upstream", float(self.mach_upstream))
        values = [self.mach, self.ratio, self.f11, self.f12, self.f21, self.f22]
        if self.mach_upstream is not None:
            values.append(self.mach_upstream)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("shock parameters must be finite")
        if self.mach <= 0:
            raise ValueError(f"mach must be > 0, got {self.mach}")
        if self.ratio <= 0:
            raise ValueError(f"ratio must be > 0, got {self.ratio}")

    @property
    def f(self) -> np.ndarray:
        """Deformation gradient as a read-only 2x2 array."""
        arr = np.array([[self.f11, self.f12], [self.f21, self.f22]], dtype=float)
        arr.setflags(write=False)
        return arr

    @classmethod
    def from_matrix(
        cls,
        mach: float,
        ratio: float,
        f: np.ndarray | list | tuple,
        mach_upstream: float | None = None,
    ) -> "ShockParameters":
        m = np.asarray(f, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"deformation gradient must be 2x2, got shape {m.shape}")
        return cls(mach, ratio, m[0, 0], m[0, 1], m[1, 0], m[1, 1], mach_upstream)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ShockParameters":
        """Build from a config mapping (``mach``/``ratio`` keys, deformation
        entries either flat ``f11..f22`` or under a nested ``f`` table)."""
        table = dict(data)
        nested = table.pop("f", None) or {}
        entries = {}
        for key in ("f11", "f12", "f21", "f22"):
            if key in table:
                entries[key] = float(table.pop(key))
            elif key in nested:
                entries[key] = float(nested[key])
        if "mach" not in table or "ratio" not in table:
            raise ValueError("config must define 'mach' and 'ratio'")
        upstream = table.pop("mach_upstream", None)
        return cls(
            mach=float(table["mach"]),
            ratio=float(table["ratio"]),
            mach_upstream=None if upstream is None else float(upstream),
            **entries,
        )


@dataclass(frozen=True)
class DerivedQuantities:
    """Every scalar the stability analysis uses, frozen at construction.

    Carries the inputs as well so downstream code (and the extended
    precision re-evaluation) can recompute anything from the exact floats.
    ``mtilde`` is NaN when M <= m1 (it only enters Lax-admissible formulas);
    ``dstab`` is always computed from ``mtilde_sq`` and stays finite.
    """

    mach: float
    ratio: float
    f11: float
    f12: float
    f21: float
    f22: float
    m1: float
    m2: float
    mstar: float
    beta: float
    ell0: float
    sigma: float
    d0: float
    a0: float
    mtilde: float
    mtilde_sq: float
    dstab: float
    k: float
    k1: float
    k2: float
    k3: float
    detf: float

    @property
    def f(self) -> np.ndarray:
        arr = np.array([[self.f11, self.f12], [self.f21, self.f22]], dtype=float)
        arr.setflags(write=False)
        return arr

    @property
    def threshold(self) -> float:
        """Weak-stability threshold k1 + k2."""
        return self.k1 + self.k2

    @property
    def margin(self) -> float:
        """(k1 + k2) - k; positive means uniformly stable."""
        return self.k1 + self.k2 - self.k


def derive(params: ShockParameters) -> DerivedQuantities:
    """Compute all derived scalars for a parameter point.

    Defined whenever the point is hyperbolic (M < mstar); Lax admissibility
    is *not* required here, so callers can still report margins for
    inadmissible points.

    Raises
    ------
    NonHyperbolicPoint
        If M >= mstar, i.e. beta^2 <= 0.
    """
    m = params.mach
    r = params.ratio
    m1 = math.hypot(params.f11, params.f12)
    m2 = math.hypot(params.f21, params.f22)
    mstar_sq = 1.0 + m1 * m1
    beta_sq = mstar_sq - m * m
    if beta_sq <= 0.0:
        raise NonHyperbolicPoint(
            f"M={m} >= mstar={math.sqrt(mstar_sq)}: outside the hyperbolic range"
        )
    mstar = math.sqrt(mstar_sq)
    beta = math.sqrt(beta_sq)
    ell0 = params.f11 * params.f21 + params.f12 * params.f22
    detf = params.f11 * params.f22 - params.f12 * params.f21
    sigma = math.sqrt(mstar_sq + m2 * m2 + detf * detf)
    d0 = (mstar_sq + m * m) / (2.0 * m * m)
    a0 = -beta_sq * r / (2.0 * m * m)
    mtilde_sq = m * m - m1 * m1
    mtilde = math.sqrt(mtilde_sq) if mtilde_sq >= 0.0 else math.nan
    core = m * sigma - abs(ell0) * beta
    k = r * mtilde_sq + m2 * m2
    k1 = core * core / (mstar_sq * mstar_sq)
    k2 = 1.0 + m2 * m2
    k3 = (m * sigma + abs(ell0) * beta) ** 2 / (mstar_sq * mstar_sq)
    dstab = core * core - mstar_sq * mstar_sq * mtilde_sq
    return DerivedQuantities(
        mach=m,
        ratio=r,
        f11=params.f11,
        f12=params.f12,
        f21=params.f21,
        f22=params.f22,
        m1=m1,
        m2=m2,
        mstar=mstar,
        beta=beta,
        ell0=ell0,
        sigma=sigma,
        d0=d0,
        a0=a0,
        mtilde=mtilde,
        mtilde_sq=mtilde_sq,
        dstab=dstab,
        k=k,
        k1=k1,
        k2=k2,
        k3=k3,
        detf=detf,
    )


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the Lax 1-shock conditions with distances to each bound.

    ``upstream_pass`` is None when no upstream Mach number was provided
    (the check is advisory).  All comparisons are strict with zero
    tolerance; proximity lives in the margins, never in the verdict.
    """

    downstream_pass: bool
    upstream_pass: bool | None
    lower_margin: float
    upper_margin: float
    upstream_bound: float | None
    upstream_margin: float | None

    @property
    def admissible(self) -> bool:
        return self.downstream_pass and self.upstream_pass is not False


def check_lax(params: ShockParameters) -> AdmissibilityReport:
    """Evaluate the Lax 1-shock conditions m1 < M < mstar and, when an
    upstream Mach number is given, M_- > M / sqrt(M^2 - m1^2)."""
    m = params.mach
    m1 = math.hypot(params.f11, params.f12)
    mstar = math.sqrt(1.0 + m1 * m1)
    lower = m - m1
    upper = mstar - m
    downstream = lower > 0.0 and upper > 0.0

    bound: float | None = None
    upstream_margin: float | None = None
    upstream: bool | None = None
    if params.mach_upstream is not None:
        mtilde_sq = m * m - m1 * m1
        if mtilde_sq > 0.0:
            bound = m / math.sqrt(mtilde_sq)
            upstream_margin = params.mach_upstream - bound
            upstream = upstream_margin > 0.0
        else:
            # The bound degenerates together with the downstream condition.
            bound = math.inf
            upstream_margin = -math.inf
            upstream = False
    return AdmissibilityReport(
        downstream_pass=downstream,
        upstream_pass=upstream,
        lower_margin=lower,
        upper_margin=upper,
        upstream_bound=bound,
        upstream_margin=upstream_margin,
    )


def deformation_determinant_mismatch(
    params: ShockParameters, expected: float, rel_tol: float = 1e-9
) -> float | None:
    """Optional strict-mode check of det(F) against a caller-declared value.

    The analysis itself never constrains det(F); this helper only flags a
    declared inconsistency.  Returns the signed mismatch det(F) - expected,
    or None when it is within ``rel_tol`` relative tolerance.
    """
    detf = params.f11 * params.f22 - params.f12 * params.f21
    mismatch = detf - expected
    if abs(mismatch) <= rel_tol * max(1.0, abs(expected)):
        return None
    return mismatch
