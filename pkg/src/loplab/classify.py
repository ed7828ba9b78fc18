"""Stability classification, condition equivalence, and parameter sweeps.

A Lax-admissible point is uniformly stable iff k < k1 + k2 (strict); at or
above the threshold it is weakly stable, and violent instability cannot
occur.  The same condition has two other algebraically equivalent forms
that are evaluated independently as a guard against transcription errors:

* the quartic deformation inequality, written directly in the entries of
  the deformation gradient, and
* the Mach-number form  mtilde^2 (R - 1) < 1 + dstab / mstar^4.

In exact arithmetic all three margins are equal up to the positive factor
mstar^4; in floats they can disagree near the threshold, so whenever the
margin is tiny (or the booleans split) everything is re-evaluated with
mpmath before the verdict is committed.

:func:`classify_full` additionally runs the numerical path — boundary
root construction plus the interior scan — and raises
:class:`DisagreementError` if it contradicts the closed form.  That error
is the package's primary correctness alarm, not a user-input problem.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import IO, Mapping, Sequence

import mpmath

from .lopatinski import find_boundary_roots, scan_interior_roots
from .params import (
    DerivedQuantities,
    NonHyperbolicPoint,
    ShockParameters,
    check_lax,
    derive,
)

__all__ = [
    "Stability",
    "StabilityVerdict",
    "DisagreementError",
    "quartic_margin",
    "machform_margin",
    "conditions_mp",
    "classify_closed_form",
    "classify_full",
    "SweepAxis",
    "SweepSpec",
    "sweep",
    "sweep_spec_from_dict",
    "write_csv",
    "write_jsonl",
    "SWEEP_COLUMNS",
]


class Stability(Enum):
    UNIFORM = "UniformlyStable"
    WEAK = "WeaklyStable"
    VIOLENT = "ViolentlyUnstable"
    INADMISSIBLE = "Inadmissible"


class DisagreementError(RuntimeError):
    """Closed-form and numerical classifications disagree (or the three
    closed-form conditions split beyond extended precision).  Always a
    bug in the build, never a property of the input."""


@dataclass(frozen=True)
class StabilityVerdict:
    """Classification outcome with its evidence.

    ``margin`` is (k1 + k2) - k (positive means uniformly stable);
    ``condition_quartic`` and ``condition_threshold`` are the two
    independently evaluated forms of the stability condition;
    ``delta_branch_roots`` counts boundary roots found by the numerical
    path and ``agreement`` records whether that path matched the closed
    form (both None when only the closed form ran).
    """

    verdict: Stability
    margin: float
    condition_quartic: bool | None = None
    condition_threshold: bool | None = None
    delta_branch_roots: int | None = None
    agreement: bool | None = None


def quartic_margin(d: DerivedQuantities) -> float:
    """LHS - RHS of the quartic deformation inequality, evaluated verbatim
    from the deformation entries (positive iff uniformly stable)."""
    m_sq = d.mach * d.mach
    row1 = d.f11 * d.f11 + d.f12 * d.f12
    row2 = d.f21 * d.f21 + d.f22 * d.f22
    frob = row1 + row2
    det = d.f11 * d.f22 - d.f12 * d.f21
    ell = d.f11 * d.f21 + d.f12 * d.f22
    bracket = 1.0 + frob + det * det
    mstar_sq = 1.0 + row1
    lhs = (
        (mstar_sq + m_sq) * bracket
        - (d.ratio * (m_sq - row1) + row2) * mstar_sq * mstar_sq
        + ell * ell * (2.0 * mstar_sq - m_sq)
    )
    rhs = 2.0 * d.mach * abs(ell) * math.sqrt((mstar_sq - m_sq) * bracket)
    return lhs - rhs


def machform_margin(d: DerivedQuantities) -> float:
    """1 + dstab/mstar^4 - mtilde^2 (R - 1), the Mach-number form of the
    stability margin (positive iff uniformly stable)."""
    mstar4 = d.mstar**4
    return 1.0 + d.dstab / mstar4 - d.mtilde_sq * (d.ratio - 1.0)


def conditions_mp(d: DerivedQuantities, dps: int = 50):
    """All three stability margins recomputed with mpmath from the exact
    input floats.  Returns (threshold_margin, quartic_margin,
    machform_margin) as mpf values at ``dps`` digits."""
    with mpmath.workdps(dps):
        m = mpmath.mpf(d.mach)
        r = mpmath.mpf(d.ratio)
        f11 = mpmath.mpf(d.f11)
        f12 = mpmath.mpf(d.f12)
        f21 = mpmath.mpf(d.f21)
        f22 = mpmath.mpf(d.f22)
        row1 = f11 * f11 + f12 * f12
        row2 = f21 * f21 + f22 * f22
        mstar_sq = 1 + row1
        beta_sq = mstar_sq - m * m
        ell = f11 * f21 + f12 * f22
        det = f11 * f22 - f12 * f21
        sigma_sq = mstar_sq + row2 + det * det
        sigma = mpmath.sqrt(sigma_sq)
        beta = mpmath.sqrt(beta_sq)
        mtilde_sq = m * m - row1
        core = m * sigma - abs(ell) * beta
        k = r * mtilde_sq + row2
        k1 = core * core / (mstar_sq * mstar_sq)
        k2 = 1 + row2
        margin = k1 + k2 - k
        lhs = (
            (mstar_sq + m * m) * sigma_sq
            - (r * mtilde_sq + row2) * mstar_sq * mstar_sq
            + ell * ell * (2 * mstar_sq - m * m)
        )
        rhs = 2 * m * abs(ell) * mpmath.sqrt(beta_sq * sigma_sq)
        quartic = lhs - rhs
        dstab = core * core - mstar_sq * mstar_sq * mtilde_sq
        machform = 1 + dstab / (mstar_sq * mstar_sq) - mtilde_sq * (r - 1)
        return margin, quartic, machform


# Relative margin size below which the verdict is recommitted in extended
# precision; the three float margins differ by large rearrangements with
# cancellation, so near the threshold only mpmath is trusted.
_MP_BAND = 1e-9


def classify_closed_form(d: DerivedQuantities) -> StabilityVerdict:
    """Closed-form classification of a derived point.

    Evaluates the threshold condition, the quartic form, and the
    Mach-number form; the three must agree (after extended-precision
    re-evaluation when any of them is ambiguous), otherwise
    :class:`DisagreementError`.  The exact threshold k = k1 + k2
    classifies as weakly stable.
    """
    downstream = d.m1 < d.mach < d.mstar
    margin = d.margin
    flags = (margin > 0.0, quartic_margin(d) > 0.0, machform_margin(d) > 0.0)
    near = abs(margin) < _MP_BAND * (d.k1 + d.k2)
    if near or len(set(flags)) > 1:
        margin_mp, quartic_mp, machform_mp = conditions_mp(d)
        flags = (margin_mp > 0, quartic_mp > 0, machform_mp > 0)
        if len(set(flags)) > 1 and abs(margin_mp) > 1e-12 * (d.k1 + d.k2):
            raise DisagreementError(
                "stability-condition forms disagree in extended precision: "
                f"margins {float(margin_mp):.3e}, {float(quartic_mp):.3e}, "
                f"{float(machform_mp):.3e} at {d!r}"
            )
        uniform = margin_mp > 0
        flags = (uniform, uniform, uniform)
    else:
        uniform = flags[0]
    if not downstream:
        verdict = Stability.INADMISSIBLE
    else:
        verdict = Stability.UNIFORM if uniform else Stability.WEAK
    return StabilityVerdict(
        verdict=verdict,
        margin=margin,
        condition_quartic=flags[1],
        condition_threshold=flags[0],
    )


def classify_full(
    params: ShockParameters,
    accept_tol: float = 1e-8,
    scan: bool = True,
    scan_kwargs: Mapping | None = None,
    raise_on_disagreement: bool = True,
) -> StabilityVerdict:
    """Full classification: Lax check, closed form, boundary root
    construction, and (by default) the interior scan.

    ``agreement`` is True when boundary roots exist iff the closed form
    says weakly stable, and the interior scan found nothing.  Inside a
    narrow band around the threshold the existence half is waived: there
    the verdict is decided in extended precision while root validation
    works at float resolution, so the two can legitimately straddle the
    glancing merge.  Any disagreement raises :class:`DisagreementError`
    unless ``raise_on_disagreement`` is False, in which case the
    discrepancy is encoded in the returned record (an interior root
    forces the verdict ``ViolentlyUnstable``, which for admissible input
    always means a bug).
    """
    try:
        d = derive(params)
    except NonHyperbolicPoint:
        return StabilityVerdict(verdict=Stability.INADMISSIBLE, margin=math.nan)
    closed = classify_closed_form(d)
    report = check_lax(params)
    if not report.admissible or closed.verdict is Stability.INADMISSIBLE:
        return StabilityVerdict(
            verdict=Stability.INADMISSIBLE,
            margin=closed.margin,
            condition_quartic=closed.condition_quartic,
            condition_threshold=closed.condition_threshold,
        )
    boundary = find_boundary_roots(d, accept_tol=accept_tol)
    interior = scan_interior_roots(d, **dict(scan_kwargs or {})) if scan else []
    existence_match = (len(boundary) > 0) == (closed.verdict is Stability.WEAK)
    in_threshold_band = abs(closed.margin) <= 1e-6 * (1.0 + d.k1 + d.k2 + d.k3)
    agreement = bool((len(interior) == 0) and (existence_match or in_threshold_band))
    if not agreement and raise_on_disagreement:
        raise DisagreementError(
            f"numerical path disagrees with closed form: verdict={closed.verdict.value}, "
            f"boundary_roots={len(boundary)}, interior_roots={len(interior)} "
            f"for {params!r}"
        )
    verdict = closed.verdict if not interior else Stability.VIOLENT
    return StabilityVerdict(
        verdict=verdict,
        margin=closed.margin,
        condition_quartic=closed.condition_quartic,
        condition_threshold=closed.condition_threshold,
        delta_branch_roots=len(boundary),
        agreement=agreement,
    )


# ---------------------------------------------------------------------------
# Parameter sweeps


_AXIS_NAMES = ("mach", "ratio", "f11", "f12", "f21", "f22")

SWEEP_COLUMNS = (
    "M", "R", "F11", "F12", "F21", "F22",
    "M1", "M2", "Mstar", "beta", "ell0", "sigma",
    "K", "K1", "K2", "K3", "margin", "verdict", "boundary_roots",
)

_MAX_SWEEP_POINTS = 10**7


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.name not in _AXIS_NAMES:
            raise ValueError(f"unknown sweep axis {self.name!r}; expected one of {_AXIS_NAMES}")

    @classmethod
    def from_range(cls, name: str, start: float, stop: float, step: float) -> "SweepAxis":
        if step <= 0:
            raise ValueError(f"axis {name!r}: step must be positive")
        if stop < start:
            return cls(name, ())
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count > _MAX_SWEEP_POINTS:
            raise ValueError(f"axis {name!r} alone exceeds {_MAX_SWEEP_POINTS} points")
        return cls(name, tuple(start + k * step for k in range(count)))


@dataclass(frozen=True)
class SweepSpec:
    """Grid sweep: ``axes`` vary (row order is lexicographic in the axes,
    last axis fastest), everything else comes from ``fixed`` (deformation
    entries default to 0)."""

    axes: tuple[SweepAxis, ...]
    fixed: tuple[tuple[str, float], ...] = ()

    def __post_init__(self) -> None:
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate sweep axes: {names}")
        covered = set(names) | {k for k, _ in self.fixed}
        if self.axes and not {"mach", "ratio"} <= covered:
            raise ValueError("sweep must define 'mach' and 'ratio' via fixed or axes")

    @property
    def n_points(self) -> int:
        n = 1
        for axis in self.axes:
            n *= len(axis.values)
        return n

    def point(self, index: int) -> dict[str, float]:
        base: dict[str, float] = {"f11": 0.0, "f12": 0.0, "f21": 0.0, "f22": 0.0}
        base.update(self.fixed)
        for axis in reversed(self.axes):
            index, offset = divmod(index, len(axis.values))
            base[axis.name] = axis.values[offset]
        return base


def sweep_spec_from_dict(data: Mapping) -> SweepSpec:
    """Build a SweepSpec from a parsed TOML mapping: a ``fixed`` table and
    an ``axes`` array of tables, each with ``name`` plus either
    ``start``/``stop``/``step`` or an explicit ``values`` list."""
    fixed = tuple((str(k), float(v)) for k, v in dict(data.get("fixed", {})).items())
    axes = []
    for entry in data.get("axes", []):
        name = str(entry["name"])
        if "values" in entry:
            axes.append(SweepAxis(name, tuple(float(v) for v in entry["values"])))
        else:
            axes.append(
                SweepAxis.from_range(
                    name, float(entry["start"]), float(entry["stop"]), float(entry["step"])
                )
            )
    return SweepSpec(axes=tuple(axes), fixed=fixed)


def _sweep_row(point: Mapping[str, float]) -> dict:
    upstream = point.get("mach_upstream")
    params = ShockParameters(
        mach=point["mach"],
        ratio=point["ratio"],
        f11=point.get("f11", 0.0),
        f12=point.get("f12", 0.0),
        f21=point.get("f21", 0.0),
        f22=point.get("f22", 0.0),
        mach_upstream=upstream,
    )
    row = {
        "M": params.mach, "R": params.ratio,
        "F11": params.f11, "F12": params.f12,
        "F21": params.f21, "F22": params.f22,
    }
    derived_cols = ("M1", "M2", "Mstar", "beta", "ell0", "sigma", "K", "K1", "K2", "K3")
    try:
        d = derive(params)
    except NonHyperbolicPoint:
        row.update({c: math.nan for c in derived_cols})
        row.update(margin=math.nan, verdict=Stability.INADMISSIBLE.value, boundary_roots=0)
        return row
    row.update(
        M1=d.m1, M2=d.m2, Mstar=d.mstar, beta=d.beta, ell0=d.ell0, sigma=d.sigma,
        K=d.k, K1=d.k1, K2=d.k2, K3=d.k3,
    )
    closed = classify_closed_form(d)
    admissible = check_lax(params).admissible and closed.verdict is not Stability.INADMISSIBLE
    if not admissible:
        row.update(margin=closed.margin, verdict=Stability.INADMISSIBLE.value, boundary_roots=0)
        return row
    roots = find_boundary_roots(d)
    row.update(margin=closed.margin, verdict=closed.verdict.value, boundary_roots=len(roots))
    return row


def _eval_chunk(spec: SweepSpec, start: int, stop: int) -> list[dict]:
    return [_sweep_row(spec.point(i)) for i in range(start, stop)]


def _max_workers() -> int:
    base = os.cpu_count() or 1
    env = os.environ.get("LOPLAB_THREADS")
    if env:
        try:
            base = max(1, min(base, int(env)))
        except ValueError:
            raise ValueError(f"LOPLAB_THREADS must be an integer, got {env!r}") from None
    return base


def sweep(spec: SweepSpec, parallel_threshold: int = 4096) -> list[dict]:
    """Evaluate the sweep grid; one output row per point, in lexicographic
    axis order regardless of how many workers ran.

    Rows carry the inputs, derived scalars, stability margin, verdict, and
    boundary-root count.  Sweeps larger than 10^7 points are rejected.
    """
    n = spec.n_points
    if not spec.axes or n == 0:
        return []
    if n > _MAX_SWEEP_POINTS:
        raise ValueError(f"sweep has {n} points, exceeding the {_MAX_SWEEP_POINTS} cap")
    workers = _max_workers()
    if workers <= 1 or n < parallel_threshold:
        return _eval_chunk(spec, 0, n)
    chunk = max(256, -(-n // (workers * 8)))
    bounds = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = pool.map(_eval_chunk, *zip(*((spec, a, b) for a, b in bounds)))
        rows: list[dict] = []
        for part in chunks:
            rows.extend(part)
    return rows


def write_csv(rows: Sequence[Mapping], fh: IO[str]) -> None:
    fh.write(",".join(SWEEP_COLUMNS) + "\n")
    for row in rows:
        fh.write(",".join(str(row[c]) for c in SWEEP_COLUMNS) + "\n")


def write_jsonl(rows: Sequence[Mapping], fh: IO[str]) -> None:
    for row in rows:
        fh.write(json.dumps({c: row[c] for c in SWEEP_COLUMNS}) + "\n")
