"""Instantaneous ground state of the transverse Ising cluster Hamiltonian.

Two numerical routes are provided. :func:`ground_numeric` diagonalizes a full
2^N matrix. :func:`ground_state` works in the symmetric sector spanned by the
normalized indicator vectors of the geometry's component classes. The
Perron-Frobenius ground state lies in that sector for Bx > 0, and the sector
stays non-degenerate at Bx = 0 where the full spectrum does not, so the
sector route is the one used along the sweep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import mpmath
import numpy as np
from scipy.linalg import lapack

from .cluster import ClusterGeometry
from .errors import ConvergenceError, DegeneratePointError, DomainError
from .operators import build_h0, ising_parts

if TYPE_CHECKING:
    from .fastforward import Schedule

GAP_THRESHOLD = 1e-8
# analytic formulas that divide by J are refused below this coupling
J_EPSILON = 1e-6


@dataclass(frozen=True)
class GroundState:
    """Lowest eigenpair; ``gap`` is E1 - E0 in whichever space was diagonalized."""

    energy: float
    components: np.ndarray
    gap: float


@dataclass(frozen=True)
class GroundStateDerivative:
    dC_dR: np.ndarray


def jacobi_eigh(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60):
    """Cyclic Jacobi eigensolver for a small real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` sorted ascending, like
    ``numpy.linalg.eigh``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    else:
        raise ConvergenceError(f"Jacobi sweeps did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def _positive(vec: np.ndarray) -> np.ndarray:
    return -vec if vec.sum() < 0 else vec


def ground_numeric(H0: np.ndarray, method: str = "lapack") -> GroundState:
    H0 = np.asarray(H0)
    if np.iscomplexobj(H0):
        if np.abs(H0.imag).max() > 1e-14:
            raise ValueError("H0 must be real")
        H0 = H0.real
    if H0.ndim != 2 or H0.shape[0] != H0.shape[1]:
        raise ValueError("H0 must be square")
    if not np.allclose(H0, H0.T, rtol=0, atol=1e-13):
        raise ValueError("H0 must be symmetric")
    if method == "lapack":
        w, v = np.linalg.eigh(H0)
    elif method == "jacobi":
        w, v = jacobi_eigh(H0)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return GroundState(float(w[0]), _positive(v[:, 0]), float(w[1] - w[0]))


@lru_cache(maxsize=None)
def sector_basis(geometry: ClusterGeometry) -> np.ndarray:
    """Orthonormal columns spanning the fully symmetric sector, shape (2^N, k)."""
    u = np.zeros((geometry.dim, len(geometry.component_classes)))
    for c, members in enumerate(geometry.component_classes):
        for idx in members:
            u[idx - 1, c] = 1.0 / math.sqrt(len(members))
    u.setflags(write=False)
    return u


@lru_cache(maxsize=None)
def sector_parts(geometry: ClusterGeometry) -> tuple[np.ndarray, np.ndarray]:
    u = sector_basis(geometry)
    zz, xx = ising_parts(geometry)
    return u.T @ zz @ u, u.T @ xx @ u


def sector_solve(
    geometry: ClusterGeometry,
    J: float,
    Bx: float,
    dJ: float | None = None,
    dBx: float | None = None,
    gap_threshold: float = GAP_THRESHOLD,
):
    """Ground state in the symmetric sector and, optionally, its derivative.

    Returns ``(E0, gap, C, dC)`` with full-length vectors; ``dC`` is None
    unless both parameter derivatives ``dJ`` and ``dBx`` are given. The
    derivative is first-order perturbation theory summed over the excited
    sector states; dH0 preserves the cluster symmetry, so states outside the
    sector have zero matrix element and drop out of the full sum.
    """
    zz, xx = sector_parts(geometry)
    w, v, info = lapack.dsyev(J * zz - 0.5 * Bx * xx)
    if info:
        raise ConvergenceError(f"dsyev failed with info={info}")
    u = sector_basis(geometry)
    g0 = _positive(v[:, 0])
    gap = float(w[1] - w[0])
    if dJ is None or dBx is None:
        return float(w[0]), gap, u @ g0, None
    if gap < gap_threshold:
        raise DegeneratePointError(
            f"{geometry.name}: ground level degenerate at J={J:.17g}, Bx={Bx:.17g} "
            f"(gap {gap:.3e})"
        )
    dH = dJ * zz - 0.5 * dBx * xx
    coeff = (v[:, 1:].T @ (dH @ g0)) / (w[0] - w[1:])
    return float(w[0]), gap, u @ g0, u @ (v[:, 1:] @ coeff)


def ground_state(geometry: ClusterGeometry, J: float, Bx: float) -> GroundState:
    """Ground state from the symmetric sector; ``gap`` is the in-sector gap."""
    E0, gap, C, _ = sector_solve(geometry, J, Bx)
    return GroundState(E0, C, gap)


def spectrum(geometry: ClusterGeometry, J: float, Bx: float) -> np.ndarray:
    """All 2^N eigenvalues of H0, ascending."""
    return np.linalg.eigvalsh(build_h0(geometry, J, Bx))


def derivative(
    geometry: ClusterGeometry,
    schedule: "Schedule",
    R: float,
    gap_threshold: float = GAP_THRESHOLD,
) -> GroundStateDerivative:
    """dC/dR at sweep parameter R by first-order perturbation theory."""
    _, _, _, dC = sector_solve(
        geometry, schedule.coupling(R), schedule.field(R),
        schedule.dJ_dR, schedule.dBx_dR, gap_threshold,
    )
    return GroundStateDerivative(dC)


# ---------------------------------------------------------------------------
# closed-form eigenvectors, evaluated in extended precision
# ---------------------------------------------------------------------------

_NEEDS_POSITIVE_J = {"chain3", "square", "star", "chain4"}


def _class_values_analytic(name: str, J, Bx):
    """Return (E0, {representative index: unnormalized V}) as mpmath numbers."""
    mp = mpmath
    s3 = mp.sqrt(3)
    I = mp.mpc(0, 1)
    if name == "triangle":
        r = mp.sqrt(Bx**2 + 2 * Bx * J + 4 * J**2)
        return -r - Bx / 2 + J, {1: 1, 2: (2 * r + Bx + 4 * J) / (3 * Bx)}
    if name == "chain3":
        b = mp.root(
            18 * J**2 * Bx - 8 * Bx**3
            + 6 * J * I * mp.sqrt(48 * J**4 + 39 * Bx**2 * J**2 + 24 * Bx**4),
            3,
        )
        bb = mp.conj(b)
        E = mp.re(-(Bx + (b + bb) - s3 * I * (b - bb)) / 6)
        v1 = (3 * Bx**2 - 8 * J * Bx - 4 * Bx * E - 4 * E**2 - 8 * E * J) / (4 * J * Bx)
        return E, {1: v1, 2: -v1 / 2 - (2 * J + E) / Bx, 3: 1}
    if name == "pyramid":
        b = mp.root(
            35 * J**3 - 18 * Bx**2 * J
            + 3 * I * mp.sqrt(108 * J**6 + 309 * Bx**2 * J**4 + 3 * Bx**4 * J**2 + 3 * Bx**6),
            3,
        )
        bb = mp.conj(b)
        E = mp.re((-(b + bb) + 4 * J + s3 * I * (b - bb)) / 3)
        v2 = mp.re(((b + bb) + 14 * J - s3 * I * (b - bb)) / (6 * Bx))
        v6 = mp.re(
            -(
                2 * (b**2 + bb**2) - 10 * J * (b + bb) - (48 * J**2 + 15 * Bx**2)
                + I * s3 * (2 * (b**2 - bb**2) + 10 * J * (b - bb))
            )
            / (27 * Bx**2)
        )
        return E, {1: 1, 2: v2, 6: v6}
    if name == "square":
        b2 = mp.sqrt(16 * J**4 + Bx**4)
        b1 = mp.sqrt(8 * J**2 + 2 * Bx**2 + 2 * b2)
        common = (4 * J**2 - Bx**2 + b2) / (8 * J**2 * Bx)
        return -b1, {
            1: (b1 - 4 * J) * common,
            2: 1,
            6: (b1**2 - 4 * b2) * b1 / (16 * J**2 * Bx),
            10: (b1 + 4 * J) * common,
        }
    if name == "star":
        b = mp.sqrt(2 * Bx**2 + 5 * J**2 + 2 * mp.sqrt(Bx**4 + Bx**2 * J**2 + 4 * J**4))
        return -b, {
            1: (-J * (7 * Bx**2 + 3 * J**2) + b * (4 * Bx**2 + 3 * b * J - b**2 + J**2))
            / (5 * J * Bx**2),
            2: (-2 * J * (9 * J**2 - 4 * Bx**2) + b * (4 * Bx**2 - 2 * b * J - b**2 + 21 * J**2))
            / (30 * J**2 * Bx),
            4: (-2 * J * (J**2 + 4 * Bx**2) - b * (4 * Bx**2 - 2 * b * J - b**2 + J**2))
            / (10 * J**2 * Bx),
            6: 1,
        }
    if name == "chain4":
        b1 = mp.root(
            64 * J**6 + 15 * J**4 * Bx**2 + 21 * Bx**4 * J**2 + 8 * Bx**6
            + 3 * s3 * J**2 * Bx * I
            * mp.sqrt(128 * J**6 + 93 * J**4 * Bx**2 + 51 * Bx**4 * J**2 + 25 * Bx**6),
            3,
        )
        B = mp.sqrt(mp.re(2 * (b1 + mp.conj(b1)) + 11 * J**2 + 4 * Bx**2))
        v2 = -(
            s3 * J**2 * B * (180 * Bx**2 + 144 * J**2) - s3 * B**3 * (12 * Bx**2 + 33 * J**2)
            + s3 * B**5 - 162 * J**5
        ) / (162 * J**4 * Bx)
        v3 = (
            s3 * J**2 * B * (180 * Bx**2 + 198 * J**2) - s3 * B**3 * (12 * Bx**2 + 33 * J**2)
            + s3 * B**5 + 324 * J**5
        ) / (162 * J**4 * Bx)
        v6 = (
            -s3 * J**2 * B * (144 * Bx**2 + 81 * J**2) - J * B**2 * (36 * Bx**2 + 90 * J**2)
            + s3 * B**3 * (12 * Bx**2 + 30 * J**2) + 3 * J * B**4 - s3 * B**5
            + 243 * J**5 + 648 * Bx**2 * J**3
        ) / (216 * Bx**2 * J**3)
        v7 = -(
            s3 * J**2 * B * (144 * Bx**2 + 81 * J**2) - J * B**2 * (36 * Bx**2 + 90 * J**2)
            - s3 * B**3 * (12 * Bx**2 + 30 * J**2) + 3 * J * B**4 + s3 * B**5
            + 243 * J**5 + 324 * J**3 * Bx**2
        ) / (108 * Bx**2 * J**3)
        v10 = -(
            s3 * J**2 * B * (144 * Bx**2 - 9 * J**2) + J * B**2 * (108 * Bx**2 + 54 * J**2)
            + 6 * s3 * B**3 * (2 * Bx**2 + J**2) - 9 * J * B**4 - s3 * B**5
            + 648 * Bx**2 * J**3 - 81 * J**5
        ) / (648 * Bx**2 * J**3)
        return -B / s3, {1: 1, 2: v2, 3: v3, 6: v6, 7: v7, 10: v10}
    raise ValueError(f"no closed form for {name}")


def ground_analytic(
    geometry: ClusterGeometry, J: float, Bx: float, dps: int = 60
) -> GroundState:
    """Ground state from the closed-form component expressions.

    The expressions cancel badly when J/Bx is far from 1, so they are
    evaluated with ``dps`` decimal digits and rounded at the end. ``gap`` is
    not available from these formulas and is NaN.
    """
    if not (math.isfinite(J) and math.isfinite(Bx)) or Bx <= 0:
        raise DomainError(f"closed form needs Bx > 0, got Bx={Bx}")
    if geometry.name in _NEEDS_POSITIVE_J and J <= J_EPSILON:
        raise DomainError(f"{geometry.name} closed form needs J > {J_EPSILON}, got J={J}")
    with mpmath.workdps(dps):
        E, values = _class_values_analytic(geometry.name, mpmath.mpf(J), mpmath.mpf(Bx))
        reps = geometry.representatives()
        if tuple(values) != reps:
            raise AssertionError(f"class representatives mismatch for {geometry.name}")
        norm = mpmath.sqrt(
            sum(m * mpmath.mpf(values[r]) ** 2 for r, m in zip(reps, geometry.multiplicities()))
        )
        comps = np.zeros(geometry.dim)
        for r, members in zip(reps, geometry.component_classes):
            val = float(mpmath.re(values[r]) / norm)
            for idx in members:
                comps[idx - 1] = val
        energy = float(mpmath.re(E))
    return GroundState(energy, comps, math.nan)
