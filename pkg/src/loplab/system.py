"""Linearized interior and boundary matrices of the shock problem.

The scaled perturbation behind the shock is ordered as

    U = (p, v1, v2, F11, F21, F12, F22)

throughout the package.  The interior system is

    A0 dt U + A1 d1 U + A2 d2 U = 0        (x1 > 0)

with symmetric 7x7 coefficient matrices, and the boundary conditions form

    B0 dt U + B2 d2 U + B3 U = 0           (x1 = 0)

with 6x7 matrices, rows ordered as: mass/momentum trace row, the
cross-differentiated front-elimination row, the two deformation rows
coupling F11/F12 to p and v2, and the two rows coupling F21/F22 to v2.

After Laplace transform in t (variable ``s``) and Fourier transform in x2
(variable ``omega``), the boundary operator is ``s*B0 + i*omega*B2 + B3``;
its one-dimensional null space is spanned by the closed-form vector
returned by :func:`boundary_kernel`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DerivedQuantities

__all__ = [
    "UNKNOWN_ORDER",
    "SystemMatrices",
    "BoundaryKernel",
    "assemble_interior",
    "assemble_boundary",
    "assemble_system",
    "boundary_kernel",
    "boundary_operator",
    "boundary_residual",
]

UNKNOWN_ORDER = ("p", "v1", "v2", "F11", "F21", "F12", "F22")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SystemMatrices:
    """Interior (a0, a1, a2; 7x7 symmetric) and boundary (b0, b2, b3; 6x7)
    matrices.  Arrays are marked read-only; treat instances as values."""

    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    b0: np.ndarray
    b2: np.ndarray
    b3: np.ndarray


@dataclass(frozen=True)
class BoundaryKernel:
    """Null vector u0 of the transformed boundary operator at (s, omega),
    together with a1u0 = A1 @ u0 (always formed by multiplication)."""

    u0: np.ndarray
    a1u0: np.ndarray


def assemble_interior(
    d: DerivedQuantities, f: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Assemble (A0, A1, A2).  Entries are placed symmetrically, never
    computed twice, so symmetry is exact."""
    f = d.f if f is None else np.asarray(f, dtype=float)
    msq = d.mach * d.mach
    a0 = np.diag([1.0, msq, msq, 1.0, 1.0, 1.0, 1.0])

    a1 = np.zeros((7, 7))
    a1[0, 0] = 1.0
    a1[0, 1] = a1[1, 0] = 1.0
    a1[1, 1] = a1[2, 2] = msq
    # v-rows couple to the deformation columns through the first row of f.
    for col, entry in ((3, f[0, 0]), (5, f[0, 1])):
        a1[1, col] = a1[col, 1] = -entry
        a1[2, col + 1] = a1[col + 1, 2] = -entry
    for j in range(3, 7):
        a1[j, j] = 1.0

    a2 = np.zeros((7, 7))
    a2[0, 2] = a2[2, 0] = 1.0
    for col, entry in ((3, f[1, 0]), (5, f[1, 1])):
        a2[1, col] = a2[col, 1] = -entry
        a2[2, col + 1] = a2[col + 1, 2] = -entry
    return _frozen(a0), _frozen(a1), _frozen(a2)


def assemble_boundary(
    d: DerivedQuantities, f: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Assemble (B0, B2, B3) in the fixed row order documented above."""
    f = d.f if f is None else np.asarray(f, dtype=float)
    msq = d.mach * d.mach
    r = d.ratio
    b0 = np.zeros((6, 7))
    b2 = np.zeros((6, 7))
    b3 = np.zeros((6, 7))

    # Row 0: v1 + d0*p - (ell0/(M^2 R)) v2 = 0 (algebraic).
    b3[0, 0] = d.d0
    b3[0, 1] = 1.0
    b3[0, 2] = -d.ell0 / (msq * r)
    # Row 1: dt v2 - (ell0/M^2) d2 v2 - a0 d2 p = 0 (front perturbation
    # eliminated by cross differentiation; the only row with dt/d2 terms).
    b0[1, 2] = 1.0
    b2[1, 0] = -d.a0
    b2[1, 2] = -d.ell0 / msq
    # Rows 2-3: F11 + f11*p - (f21/R) v2 = 0 and F12 + f12*p - (f22/R) v2 = 0.
    b3[2, 0] = f[0, 0]
    b3[2, 2] = -f[1, 0] / r
    b3[2, 3] = 1.0
    b3[3, 0] = f[0, 1]
    b3[3, 2] = -f[1, 1] / r
    b3[3, 5] = 1.0
    # Rows 4-5: F21 - f11*v2 = 0 and F22 - f12*v2 = 0.
    b3[4, 2] = -f[0, 0]
    b3[4, 4] = 1.0
    b3[5, 2] = -f[0, 1]
    b3[5, 6] = 1.0
    return _frozen(b0), _frozen(b2), _frozen(b3)


def assemble_system(d: DerivedQuantities, f: np.ndarray | None = None) -> SystemMatrices:
    a0, a1, a2 = assemble_interior(d, f)
    b0, b2, b3 = assemble_boundary(d, f)
    return SystemMatrices(a0=a0, a1=a1, a2=a2, b0=b0, b2=b2, b3=b3)


def boundary_operator(mats: SystemMatrices, s: complex, omega: float) -> np.ndarray:
    """Transformed boundary operator s*B0 + i*omega*B2 + B3."""
    return s * mats.b0 + 1j * omega * mats.b2 + mats.b3


def boundary_kernel(
    d: DerivedQuantities, f: np.ndarray | None, s: complex, omega: float
) -> BoundaryKernel:
    """Closed-form null vector of the boundary operator at (s, omega).

    The vector is degree-1 homogeneous in (s, omega) and normalized so its
    first component is ``s - i*ell0*omega/M^2``; no renormalization is
    applied since determinant roots are scale invariant.  ``a1u0`` is the
    matrix product A1 @ u0, not a transcription of any closed form.
    """
    f = d.f if f is None else np.asarray(f, dtype=float)
    msq = d.mach * d.mach
    r = d.ratio
    ell_over = 1j * d.ell0 * omega / msq
    # Components 3 and 5 both need the -f1j*s term so the deformation-row
    # boundary conditions annihilate the pressure trace f1j*(s - ...).
    u0 = np.array(
        [
            s - ell_over,
            -d.d0 * s + ell_over,
            1j * d.a0 * omega,
            -f[0, 0] * s + 1j * (d.a0 * f[1, 0] / r + d.ell0 * f[0, 0] / msq) * omega,
            1j * d.a0 * f[0, 0] * omega,
            -f[0, 1] * s + 1j * (d.a0 * f[1, 1] / r + d.ell0 * f[0, 1] / msq) * omega,
            1j * d.a0 * f[0, 1] * omega,
        ],
        dtype=complex,
    )
    _, a1, _ = assemble_interior(d, f)
    a1u0 = a1 @ u0
    return BoundaryKernel(u0=_frozen(u0), a1u0=_frozen(a1u0))


def boundary_residual(
    mats: SystemMatrices, kernel: BoundaryKernel, s: complex, omega: float
) -> float:
    """Relative residual ||(s*B0 + i*omega*B2 + B3) u0|| / ||u0||."""
    op = boundary_operator(mats, s, omega)
    return float(np.linalg.norm(op @ kernel.u0) / np.linalg.norm(kernel.u0))
