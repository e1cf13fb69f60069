"""Linear system for the regularization strengths and its solution.

With H~ = i * sum_j x_j G_j (G_j real antisymmetric) and real C, the
condition H~ C = i dC/dR becomes the real system sum_j x_j (G_j C) = dC/dR.
The adiabatic-phase term drops out because C . dC/dR = 0 for real,
normalized C.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import lapack

from .cluster import ClusterGeometry
from .errors import ConvergenceError, DomainError, InconsistentSystemError
from .groundstate import (
    GroundState,
    GroundStateDerivative,
    derivative,
    ground_state,
    sector_solve,
)
from .operators import RegWeights, build_reg, reg_generators

SV_CUTOFF = 1e-10
RESIDUAL_LIMIT = 1e-8


@dataclass
class CoreSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    n_pair: int
    has_q: bool

    @cached_property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    @cached_property
    def effective_rank(self) -> int:
        s = self.singular_values
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.sum(s > SV_CUTOFF * s[0]))


@dataclass(frozen=True)
class RegularizationSolution:
    weights: RegWeights
    residual: float
    rank: int


def assemble(
    geometry: ClusterGeometry,
    gs: GroundState,
    d: GroundStateDerivative,
    drop_q: bool = False,
) -> CoreSystem:
    """Coefficient matrix (one column per unknown) and right-hand side.

    All 2^N rows are kept. ``drop_q`` removes the 3-body column.
    """
    C = np.asarray(gs.components, dtype=float)
    b = np.asarray(d.dC_dR, dtype=float)
    if C.shape != (geometry.dim,) or b.shape != (geometry.dim,):
        raise ValueError(
            f"{geometry.name} needs vectors of length {geometry.dim}, "
            f"got {C.shape} and {b.shape}"
        )
    gens = reg_generators(geometry)
    has_q = geometry.q_included and not drop_q
    if geometry.q_included and drop_q:
        gens = gens[:-1]
    return CoreSystem((gens @ C).T, b.copy(), len(geometry.w_classes), has_q)


def _to_weights(system: CoreSystem, x: np.ndarray) -> RegWeights:
    q = float(x[system.n_pair]) if system.has_q else 0.0
    return RegWeights(tuple(x[: system.n_pair]), q)


def lstsq_svd(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, int, float]:
    """Minimum-norm least squares; returns ``(x, rank, max-norm residual)``.

    Singular values below ``SV_CUTOFF`` times the largest are treated as zero.
    """
    u, s, vt, info = lapack.dgesdd(A, compute_uv=1, full_matrices=0)
    if info:
        raise ConvergenceError(f"dgesdd failed with info={info}")
    keep = s > SV_CUTOFF * s[0] if s.size and s[0] > 0 else np.zeros(s.shape, bool)
    x = vt[keep].T @ ((u[:, keep].T @ b) / s[keep])
    return x, int(keep.sum()), float(np.abs(A @ x - b).max())


def _check_residual(residual: float, rank: int, n_unknowns: int, check: str) -> None:
    if check not in ("always", "full-rank", "never"):
        raise ValueError(f"unknown residual check {check!r}")
    if residual <= RESIDUAL_LIMIT or check == "never":
        return
    if check == "always" or rank == n_unknowns:
        raise InconsistentSystemError(
            f"core equation not satisfiable: residual {residual:.3e} (rank {rank})"
        )


def solve(system: CoreSystem, check: str = "always") -> RegularizationSolution:
    """Minimum-norm least-squares solution via SVD.

    ``check`` controls when a residual above ``RESIDUAL_LIMIT`` raises:
    ``"always"``, only when no singular value was truncated
    (``"full-rank"``), or ``"never"``.
    """
    x, rank, residual = lstsq_svd(system.matrix, system.rhs)
    _check_residual(residual, rank, system.matrix.shape[1], check)
    return RegularizationSolution(_to_weights(system, x), residual, rank)


def strengths(
    geometry: ClusterGeometry,
    J: float,
    Bx: float,
    dJ: float,
    dBx: float,
    check: str = "always",
) -> np.ndarray:
    """Unknown vector (pair classes, then Q) at one parameter point.

    Array-level path used inside the time stepper; same algebra as
    assemble + solve without building the intermediate records.
    """
    _, _, C, dC = sector_solve(geometry, J, Bx, dJ, dBx)
    x, rank, residual = lstsq_svd((reg_generators(geometry) @ C).T, dC)
    _check_residual(residual, rank, geometry.n_unknowns, check)
    return x


def regularization(
    geometry: ClusterGeometry, schedule, R: float, check: str = "always"
) -> RegularizationSolution:
    """Solve for the strengths at sweep parameter R."""
    gs = ground_state(geometry, schedule.coupling(R), schedule.field(R))
    d = derivative(geometry, schedule, R)
    return solve(assemble(geometry, gs, d), check)


def verify_core(
    geometry: ClusterGeometry,
    sol: RegularizationSolution,
    gs: GroundState,
    d: GroundStateDerivative,
) -> float:
    """Max-norm residual of H~ C - i dC/dR."""
    Ht = build_reg(geometry, sol.weights)
    return float(np.abs(Ht @ gs.components - 1j * d.dC_dR).max())


def _nonzero(value: float, what: str) -> float:
    if abs(value) < 1e-14:
        raise DomainError(f"closed form denominator {what} vanishes")
    return value


def closed_form(
    geometry: ClusterGeometry,
    gs: GroundState,
    d: GroundStateDerivative,
    literal: bool = False,
) -> RegularizationSolution:
    """Strengths from the per-geometry closed-form expressions.

    Components are read from class representatives (1-based indices as in
    the basis table). For the square, the tabulated Q~ expression carries a
    spurious factor C2 in its denominator; the default evaluates the
    expression that follows from the reduced equations, ``literal=True``
    the tabulated one.
    """
    c, dc = gs.components, d.dC_dR

    def C(k):
        return c[k - 1]

    def D(k):
        return dc[k - 1]

    name = geometry.name
    if name == "triangle":
        w = (D(2) / _nonzero(2 * C(1), "2 C1"),)
        q = 0.0
    elif name == "chain3":
        s = _nonzero(C(1) + 2 * C(2) + C(3), "C1 + 2 C2 + C3")
        w = (-0.5 * (D(1) - D(3)) / s, -0.5 * (D(1) - 2 * D(2) + D(3)) / s)
        q = 0.0
    elif name == "pyramid":
        den = _nonzero(C(1) - C(6), "C1 - C6")
        w = (D(2) / (3 * den),)
        q = (D(1) + 3 * D(6)) / (24 * den)
    elif name == "square":
        base = _nonzero(3 * C(1) - C(10) - 2 * C(6), "3 C1 - C10 - 2 C6")
        den = base * _nonzero(C(2), "C2")
        w1 = -(
            C(1) * D(1) - 4 * C(2) * D(2) + (C(1) + C(10)) * D(6) - (C(1) - 2 * C(6)) * D(10)
        ) / (8 * den)
        w2 = -(C(1) * D(1) - (C(1) - 2 * C(6) - C(10)) * D(6) + C(1) * D(10)) / (4 * den)
        q = (D(1) + 2 * D(6) + D(10)) / (8 * (den if literal else base))
        w = (w1, w2)
    elif name == "star":
        den = _nonzero(C(1) - C(6), "C1 - C6") * _nonzero(C(1) + 3 * C(6), "C1 + 3 C6")
        w1 = (C(1) * D(4) + 3 * C(6) * D(2)) / (3 * den)
        w2 = (3 * (C(1) + C(6)) * D(2) - (C(1) - 3 * C(6)) * D(4)) / (6 * den)
        q = (
            3 * (C(1) ** 2 + 2 * C(1) * C(6) - 3 * C(6) ** 2) * D(6)
            - 3 * (3 * C(2) * C(6) + C(1) * C(4)) * D(2)
            - (3 * C(1) * C(2) - 2 * C(1) * C(4) + 3 * C(4) * C(6)) * D(4)
        ) / (24 * _nonzero(C(1), "C1") * den)
        w = (w1, w2)
    elif name == "chain4":
        p = _nonzero(C(2) + C(3), "C2 + C3")
        S = _nonzero(C(1) + C(6) + C(7) + C(10), "C1 + C6 + C7 + C10")
        T = _nonzero(3 * C(1) - C(6) - C(7) - C(10), "3 C1 - C6 - C7 - C10")
        kappa = (
            C(1) * D(1) + (C(2) - C(3)) * (D(2) - D(3)) + C(1) * (D(6) + D(7) + D(10))
        ) / (2 * p * -T)
        g1 = (D(2) - D(3)) / (2 * S)
        g2 = (D(6) + D(10)) / (4 * p) + kappa
        w = (
            (D(7) + D(10)) / (4 * p) + kappa,
            -g1 + g2,
            (D(6) + D(7)) / (4 * p) + kappa,
            g1 + g2,
        )
        q = (4 * (C(2) - C(3)) * (D(2) - D(3)) + S * (D(1) + D(6) + D(7) + D(10))) / (8 * T * S)
    else:
        raise ValueError(f"no closed form for {name}")

    weights = RegWeights(w, q)
    residual = verify_core(geometry, RegularizationSolution(weights, 0.0, 0), gs, d)
    return RegularizationSolution(weights, residual, geometry.n_unknowns)
