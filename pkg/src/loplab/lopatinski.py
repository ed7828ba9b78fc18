"""Lopatinski determinant: generic construction, closed form, and roots.

The determinant is built two independent ways and cross-checked:

* generic route — form ``s*A0 + lambda*A1 + i*omega*A2`` at the decaying
  root, replace its first row by ``(A1 u0)^T`` (six independent interior
  rows plus the boundary pairing row), and take the determinant;
* closed form — the factored expression

      det L = beta^2 Omega^2 (omega^2 - lambda^2) / (2 M^2) * brace

  where ``brace`` collects the scalar root condition.  With lambda the
  decaying root (so the dispersion quadratic vanishes), ``brace`` factors
  further as ``Omega * res_det`` and the root search reduces to the pair

      res_disp = M^2 Omega^2 - mstar^2 lambda^2 + k2 omega^2 - 2i|ell0| lambda omega
      res_det  = M^2 Omega^2 - M^2    lambda^2 + k  omega^2 - 2i|ell0| lambda omega

  in reduced variables (omega sign-flipped when ell0 < 0).  Subtracting
  the two pins every joint root to lambda^2 = (k2 - k) omega^2 / beta^2,
  which is purely imaginary in the regime k > k2: roots can only sit on
  the imaginary axis (no violent instability), and the interior scan over
  Re s > 0 is expected to come back empty for every admissible point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .dispersion import hersh_candidates, lambda_plus
from .params import DerivedQuantities
from .system import BoundaryKernel, SystemMatrices

__all__ = [
    "LopatinskiMatrix",
    "RootRecord",
    "TransitionPoints",
    "SingularSelection",
    "BranchMismatch",
    "build_determinant",
    "closed_form_determinant",
    "reduced_residual",
    "residual_scales",
    "transition_points",
    "find_boundary_roots",
    "boundary_root_scan",
    "scan_interior_roots",
    "count_zeros_rectangle",
]


class SingularSelection(ArithmeticError):
    """Rows 2-7 of the frequency-shifted interior matrix are numerically
    dependent at the requested point; the row-replaced determinant would
    be meaningless.  Carries the offending smallest singular value."""


class BranchMismatch(ArithmeticError):
    """The numerically validated boundary roots contradict the closed-form
    threshold: derived quantities are inconsistent."""


@dataclass(frozen=True)
class LopatinskiMatrix:
    """Row-replaced 7x7 matrix (row 1 <- (A1 u0)^T, rows 2-7 verbatim from
    s*A0 + lambda*A1 + i*omega*A2) and its determinant."""

    matrix: np.ndarray
    det: complex
    min_singular: float  # smallest singular value of the six kept rows


@dataclass(frozen=True)
class RootRecord:
    """A located determinant root, stored in reduced variables (omega
    normalized to 1 unless the 1D path).  ``residual_determinant`` holds
    the value of the scanned residual function, which is the reduced
    determinant condition unless a custom residual was injected."""

    s: complex
    lam: complex
    omega: float
    residual_dispersion: complex
    residual_determinant: complex
    kind: Literal["interior", "boundary"]


@dataclass(frozen=True)
class TransitionPoints:
    """Boundary frequencies where the two imaginary branches merge, and
    the merged root values there (reduced variables, omega = 1)."""

    xi_star_plus: float
    xi_star_minus: float
    delta_star_plus: float
    delta_star_minus: float


def build_determinant(
    mats: SystemMatrices,
    kernel: BoundaryKernel,
    s: complex,
    omega: float,
    lam: complex,
    dependence_tol: float = 1e-10,
) -> LopatinskiMatrix:
    """Generic route: row-replaced determinant at (s, omega, lam).

    The replacement row is always row 1; the six kept rows are checked for
    linear independence (smallest relative singular value) before the
    determinant is formed.  Makes no use of any closed form.
    """
    base = s * mats.a0 + lam * mats.a1 + 1j * omega * mats.a2
    kept = base[1:]
    svals = np.linalg.svd(kept, compute_uv=False)
    smin = float(svals[-1])
    if smin <= dependence_tol * float(svals[0]):
        raise SingularSelection(
            f"kept rows are dependent at s={s}, omega={omega}, lam={lam}: "
            f"smallest singular value {smin:.3e} (largest {float(svals[0]):.3e})"
        )
    mat = np.array(base, dtype=complex)
    mat[0] = kernel.a1u0
    mat.setflags(write=False)
    return LopatinskiMatrix(matrix=mat, det=complex(np.linalg.det(mat)), min_singular=smin)


def closed_form_determinant(
    d: DerivedQuantities, f: np.ndarray | None, s: complex, omega: float, lam: complex
) -> complex:
    """Closed-form determinant in original (signed ell0) variables.

    Agrees with :func:`build_determinant` whenever ``lam`` solves the
    decaying-mode quadratic at (s, omega); elsewhere the two expressions
    legitimately differ.
    """
    del f  # the closed form only needs derived scalars
    msq = d.mach**2
    om = s + lam
    pref = d.beta**2 * om**2 * (omega**2 - lam**2) / (2.0 * msq)
    brace = (
        (lam**2 - omega**2) * s
        + (msq * s - 1j * d.ell0 * omega) * om * lam
        + d.m1**2 * lam**2 * s
        + d.m2**2 * omega**2 * lam
        + 1j * d.ell0 * omega * lam * (s - lam)
        + d.ratio * d.mtilde_sq * omega**2 * om
    )
    return complex(pref * brace)


def reduced_residual(d: DerivedQuantities, s, omega, lam):
    """Residuals (res_disp, res_det) of the reduced root system.

    Inputs are reduced variables (sign reduction already applied); to
    evaluate at an original point with ell0 < 0, pass -omega.  Both vanish
    simultaneously exactly at determinant roots on the decaying branch.
    Accepts arrays and broadcasts.
    """
    msq = d.mach**2
    l0 = abs(d.ell0)
    om = s + lam
    momsq = msq * om * om
    cross = 2j * l0 * lam * omega
    res_disp = momsq - d.mstar**2 * lam * lam + d.k2 * omega * omega - cross
    res_det = momsq - msq * lam * lam + d.k * omega * omega - cross
    return res_disp, res_det


def residual_scales(d: DerivedQuantities, s, omega, lam):
    """Magnitude scales matching :func:`reduced_residual` term by term,
    for scale-normalized acceptance tests."""
    msq = d.mach**2
    l0 = abs(d.ell0)
    abs_om2 = np.abs(s + lam) ** 2
    abs_lam2 = np.abs(lam) ** 2
    cross = 2.0 * l0 * np.abs(lam) * abs(omega)
    w2 = omega * omega
    scale_disp = msq * abs_om2 + d.mstar**2 * abs_lam2 + d.k2 * w2 + cross
    scale_det = msq * abs_om2 + msq * abs_lam2 + d.k * w2 + cross
    return scale_disp, scale_det


def transition_points(d: DerivedQuantities) -> TransitionPoints:
    """Branch-merge frequencies xi* and merged root values delta* on the
    boundary (reduced variables, omega = 1).  delta* is computed from its
    xi* definition; the identities delta*+ = sqrt(k1)/beta and
    delta*- = -sqrt(k3)/beta are checked in the tests."""
    l0 = abs(d.ell0)
    denom = d.mach * d.mstar**2
    xi_plus = (d.mach * l0 + d.beta * d.sigma) / denom
    xi_minus = (d.mach * l0 - d.beta * d.sigma) / denom
    beta_sq = d.beta**2
    msq = d.mach**2
    return TransitionPoints(
        xi_star_plus=xi_plus,
        xi_star_minus=xi_minus,
        delta_star_plus=(msq * xi_plus - l0) / beta_sq,
        delta_star_minus=(msq * xi_minus - l0) / beta_sq,
    )


def _validated_boundary_root(
    d: DerivedQuantities, xi: float, delta_signed: float, accept_tol: float
) -> RootRecord | None:
    """Check a candidate (i*xi, i*delta_signed) for residual smallness;
    returns a record or None."""
    s = 1j * xi
    lam = 1j * delta_signed
    res_disp, res_det = reduced_residual(d, s, 1.0, lam)
    scale_disp, scale_det = residual_scales(d, s, 1.0, lam)
    if abs(res_disp) > accept_tol * scale_disp or abs(res_det) > accept_tol * scale_det:
        return None
    return RootRecord(
        s=s,
        lam=lam,
        omega=1.0,
        residual_dispersion=complex(res_disp),
        residual_determinant=complex(res_det),
        kind="boundary",
    )


def find_boundary_roots(
    d: DerivedQuantities, accept_tol: float = 1e-8
) -> list[RootRecord]:
    """Construct and validate the boundary (eta = 0) determinant roots.

    Every joint root satisfies lambda^2 = (k2 - k)/beta^2 (omega = 1), so
    for k > k2 the only candidates are lambda = +-i*delta with
    delta = sqrt(k - k2)/beta.  The matching xi follows from the
    determinant condition; a candidate is kept only if it passes the
    numerical validation that it lies on the decaying branch:

    * the recovered xi is in the branch domain (xi >= xi*+ for the +
      candidate, xi <= xi*- for the - candidate), and
    * the square-root branch membership inequality holds, so the
      candidate's lambda really is the one-sided limit of the decaying
      root and not the other quadratic root.

    The + root exists exactly when k >= k1 + k2 (weak stability), the -
    root exactly when k >= k3 + k2.  Those closed-form thresholds are
    *not* used to gate the return value — they are cross-checked against
    the validation outcome, and a contradiction raises
    :class:`BranchMismatch`.  Within a narrow band around each threshold
    the validation outcome alone decides (the branch inequalities and the
    k comparison resolve the glancing merge at slightly different
    rounding, so neither side can be called a contradiction there).
    """
    roots: list[RootRecord] = []
    excess = d.k - d.k2
    if excess <= 0.0:
        return roots
    msq = d.mach**2
    beta_sq = d.beta**2
    l0 = abs(d.ell0)
    delta = math.sqrt(excess) / d.beta
    tp = transition_points(d)
    thresh_scale = 1e-6 * (1.0 + d.k1 + d.k2 + d.k3)

    # + candidate: lam = +i*delta, xi >= xi*+.
    rad = delta * delta + (d.k + 2.0 * l0 * delta) / msq
    record: RootRecord | None = None
    if rad > 0.0:
        xi = -delta + math.sqrt(rad)
        tol_x = 1e-9 * (1.0 + abs(tp.xi_star_plus))
        tol_b = 1e-9 * (beta_sq * delta + msq * abs(xi) + l0 + 1.0)
        on_branch = beta_sq * delta - (msq * xi - l0) >= -tol_b
        in_domain = xi >= tp.xi_star_plus - tol_x
        if on_branch and in_domain:
            record = _validated_boundary_root(d, xi, delta, accept_tol)
    expected = d.k - (d.k1 + d.k2)
    if abs(expected) > thresh_scale and (expected > 0.0) != (record is not None):
        raise BranchMismatch(
            f"+ branch root validation ({record is not None}) contradicts the "
            f"closed-form threshold k - (k1+k2) = {expected:.3e}"
        )
    if record is not None:
        roots.append(record)

    # - candidate: lam = -i*delta, xi <= xi*-.
    rad = delta * delta + (d.k - 2.0 * l0 * delta) / msq
    record = None
    if rad > 0.0:
        xi = delta - math.sqrt(rad)
        tol_x = 1e-9 * (1.0 + abs(tp.xi_star_minus))
        tol_b = 1e-9 * (beta_sq * delta + msq * abs(xi) + l0 + 1.0)
        on_branch = (msq * xi - l0) + beta_sq * delta >= -tol_b
        in_domain = xi <= tp.xi_star_minus + tol_x
        if on_branch and in_domain:
            record = _validated_boundary_root(d, xi, -delta, accept_tol)
    expected = d.k - (d.k3 + d.k2)
    if abs(expected) > thresh_scale and (expected > 0.0) != (record is not None):
        raise BranchMismatch(
            f"- branch root validation ({record is not None}) contradicts the "
            f"closed-form threshold k - (k3+k2) = {expected:.3e}"
        )
    if record is not None:
        roots.append(record)
    return roots


def _limit_root(d: DerivedQuantities, xi: float) -> complex:
    """Decaying-root limit at i*xi in reduced variables."""
    omega = 1.0 if d.ell0 >= 0 else -1.0
    return lambda_plus(d, 1j * xi, omega)


def boundary_root_scan(
    d: DerivedQuantities,
    accept_tol: float = 1e-8,
    max_expand: int = 60,
) -> list[RootRecord]:
    """Independent eta = 0 root detector: bracket and bisect.

    On each purely imaginary branch domain the determinant residual at the
    decaying-root limit equals (k - k2) - beta^2 * Im(lambda)^2, a strictly
    monotone function of the branch value, so each domain carries at most
    one root and a sign bracket suffices.  No closed-form root or
    threshold enters; this is the oracle for :func:`find_boundary_roots`.
    """
    tp = transition_points(d)
    found: list[RootRecord] = []

    def residual_at(xi: float) -> float:
        lam = _limit_root(d, xi)
        _, res_det = reduced_residual(d, 1j * xi, 1.0, lam)
        return float(res_det.real)

    for start, direction in ((tp.xi_star_plus, 1.0), (tp.xi_star_minus, -1.0)):
        g_start = residual_at(start)
        scale0 = residual_scales(d, 1j * start, 1.0, _limit_root(d, start))[1]
        if abs(g_start) <= accept_tol * scale0:
            bracket = (start, start)
        elif g_start < 0.0:
            continue  # residual only decreases outward: no root on this branch
        else:
            step = max(1.0, abs(start))
            lo = start
            bracket = None
            for _ in range(max_expand):
                hi = lo + direction * step
                if residual_at(hi) <= 0.0:
                    bracket = (lo, hi) if direction > 0 else (hi, lo)
                    break
                lo = hi
                step *= 2.0
            if bracket is None:
                continue
        lo, hi = bracket
        for _ in range(200):
            if hi - lo <= 1e-15 * (1.0 + abs(lo) + abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if (residual_at(mid) > 0.0) == (direction > 0):
                lo = mid
            else:
                hi = mid
        xi = 0.5 * (lo + hi)
        lam = _limit_root(d, xi)
        record = _validated_boundary_root(d, xi, lam.imag, accept_tol)
        if record is not None:
            found.append(record)
    return found


def _select_decaying(c_plus: np.ndarray, c_minus: np.ndarray) -> np.ndarray:
    return np.where(c_plus.real >= c_minus.real, c_plus, c_minus)


def scan_interior_roots(
    d: DerivedQuantities,
    eta_min: float = 1e-4,
    eta_max: float = 10.0,
    xi_max: float = 10.0,
    grid: tuple[int, int] = (400, 800),
    accept_tol: float = 1e-8,
    newton_tol: float = 1e-12,
    refine_top: int = 16,
    residual_fn: Callable | None = None,
) -> list[RootRecord]:
    """Grid-plus-Newton search for determinant roots with Re s > 0.

    The determinant condition is scanned as the scalar residual at the
    decaying root, over a geometric eta grid times a linear xi grid
    (omega = 1 by homogeneity), followed by damped complex Newton from the
    best cells.  Converged roots with eta > eta_min are returned sorted by
    (eta, xi); for admissible parameters the expected result is empty.

    ``residual_fn(s, lam) -> complex`` replaces the determinant residual
    when given (self-test hook for planted roots); it must broadcast.
    """
    if eta_min <= 0:
        raise ValueError("eta_min must be positive")
    omega = 1.0

    def default_residual(s, lam):
        return reduced_residual(d, s, omega, lam)[1]

    func = residual_fn if residual_fn is not None else default_residual

    def decaying(s):
        return _select_decaying(*hersh_candidates(d, s, omega))

    def normalized(s, lam, value):
        return np.abs(value) / residual_scales(d, s, omega, lam)[1]

    n_eta, n_xi = grid
    etas = np.geomspace(eta_min, eta_max, n_eta)
    xis = np.linspace(-xi_max, xi_max, n_xi)
    s_grid = etas[:, None] + 1j * xis[None, :]
    lam_grid = decaying(s_grid)
    norm_grid = normalized(s_grid, lam_grid, func(s_grid, lam_grid))

    flat = norm_grid.ravel()
    order = np.argpartition(flat, min(refine_top, flat.size - 1))[:refine_top]
    seeds = [complex(s_grid.ravel()[i]) for i in order]
    extra = np.flatnonzero(flat < 1e-4)
    seeds.extend(complex(s_grid.ravel()[i]) for i in extra[:64])

    roots: list[RootRecord] = []
    for seed in seeds:
        s = seed
        converged = False
        for _ in range(60):
            lam = complex(decaying(np.asarray(s)))
            val = complex(func(s, lam))
            norm = float(normalized(s, lam, val))
            if norm <= newton_tol:
                converged = True
                break
            h = 1e-7 * (1.0 + abs(s))
            lam_p = complex(decaying(np.asarray(s + h)))
            lam_m = complex(decaying(np.asarray(s - h)))
            dval = (complex(func(s + h, lam_p)) - complex(func(s - h, lam_m))) / (2.0 * h)
            if dval == 0:
                break
            step = -val / dval
            # Damping: halve until the residual actually decreases.
            accepted = False
            for _ in range(8):
                trial = s + step
                lam_t = complex(decaying(np.asarray(trial)))
                if abs(complex(func(trial, lam_t))) < abs(val):
                    s = trial
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
        if not converged:
            lam = complex(decaying(np.asarray(s)))
            val = complex(func(s, lam))
            converged = float(normalized(s, lam, val)) <= accept_tol
        if not converged or s.real <= eta_min:
            continue
        lam = complex(decaying(np.asarray(s)))
        res_disp, _ = reduced_residual(d, s, omega, lam)
        record = RootRecord(
            s=s,
            lam=lam,
            omega=omega,
            residual_dispersion=complex(res_disp),
            residual_determinant=complex(func(s, lam)),
            kind="interior",
        )
        if not any(abs(record.s - r.s) <= 1e-6 * (1.0 + abs(r.s)) for r in roots):
            roots.append(record)
    roots.sort(key=lambda r: (r.s.real, r.s.imag))
    return roots


def count_zeros_rectangle(
    func: Callable,
    eta_bounds: tuple[float, float],
    xi_bounds: tuple[float, float],
    n_per_side: int = 1024,
    max_doublings: int = 6,
) -> int:
    """Zero count (with multiplicity) of a holomorphic function inside a
    rectangle of the s-plane, by the winding of its boundary phase.

    ``func`` must broadcast over complex arrays.  Sampling is doubled
    until no adjacent phase step reaches pi/2; a zero sitting on the
    contour raises ValueError.
    """
    e0, e1 = eta_bounds
    x0, x1 = xi_bounds
    n = n_per_side
    for _ in range(max_doublings + 1):
        t = np.linspace(0.0, 1.0, n, endpoint=False)
        edges = [
            (e0 + (e1 - e0) * t) + 1j * x0,
            e1 + 1j * (x0 + (x1 - x0) * t),
            (e1 - (e1 - e0) * t) + 1j * x1,
            e0 + 1j * (x1 - (x1 - x0) * t),
        ]
        path = np.concatenate(edges)
        vals = np.asarray(func(path), dtype=complex)
        closed = np.concatenate([vals, vals[:1]])
        mags = np.abs(closed)
        if np.min(mags) <= 1e-13 * np.max(mags):
            raise ValueError("zero on or numerically touching the contour")
        steps = np.angle(closed[1:] / closed[:-1])
        if np.max(np.abs(steps)) < 0.5 * math.pi:
            total = float(np.sum(steps)) / (2.0 * math.pi)
            count = round(total)
            if abs(total - count) > 0.05:
                raise ArithmeticError(f"winding did not close to an integer: {total}")
            return count
        n *= 2
    raise ArithmeticError("phase steps did not resolve; increase sampling")
