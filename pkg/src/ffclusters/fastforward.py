"""Time rescaling, the fast-forward Hamiltonian and its time integration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterGeometry
from .errors import StepSizeError
from .groundstate import GAP_THRESHOLD, ground_state
from .operators import RegWeights, build_h0, ising_parts, reg_generators
from .regsolver import regularization, strengths

DEFAULT_STEPS = 100_000
NORM_DRIFT_LIMIT = 1e-6
# driving is skipped when |v| falls below this fraction of vbar
V_SKIP = 1e-12
# near Bx = 0 some clusters lose a singular value to the SVD cutoff; the
# truncated solution is kept there and only full-rank misfits are errors
STEPPER_CHECK = "full-rank"


@dataclass(frozen=True)
class Schedule:
    """Sweep J = R, Bx = B0 - R with the cosine velocity profile."""

    B0: float = 10.0
    R0: float = 0.0
    vbar: float = 100.0
    Tff: float = 0.1

    def __post_init__(self):
        for name in ("B0", "R0", "vbar", "Tff"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.Tff <= 0:
            raise ValueError("Tff must be positive")
        if self.vbar < 0:
            raise ValueError("vbar must be non-negative")
        if self.B0 <= 0:
            raise ValueError("B0 must be positive")

    dJ_dR = 1.0
    dBx_dR = -1.0

    def coupling(self, R: float) -> float:
        return R

    def field(self, R: float) -> float:
        return self.B0 - R

    def _check(self, t: float) -> None:
        # one ulp of slack so t = k * dt with k = steps lands inside
        if not -1e-15 * self.Tff <= t <= self.Tff * (1 + 1e-15):
            raise ValueError(f"t={t} outside [0, {self.Tff}]")

    def _phase(self, t: float) -> float:
        # reduced to the nearest period so both endpoints give exact zeros
        f = t / self.Tff
        return 2.0 * math.pi * (f - round(f))

    def velocity(self, t: float) -> float:
        self._check(t)
        return self.vbar * (1.0 - math.cos(self._phase(t)))

    def advanced_R(self, t: float) -> float:
        self._check(t)
        w = 2.0 * math.pi / self.Tff
        return self.R0 + self.vbar * (t - math.sin(self._phase(t)) / w)


def velocity(schedule: Schedule, t: float) -> float:
    return schedule.velocity(t)


def advanced_R(schedule: Schedule, t: float) -> float:
    return schedule.advanced_R(t)


def _zero_weights(geometry: ClusterGeometry) -> RegWeights:
    return RegWeights((0.0,) * len(geometry.w_classes), 0.0)


def driving_weights(
    geometry: ClusterGeometry, schedule: Schedule, t: float
) -> tuple[float, float, RegWeights]:
    """(R, v, strengths) at time t; strengths are zero where driving is skipped."""
    R = schedule.advanced_R(t)
    v = schedule.velocity(t)
    if abs(v) <= V_SKIP * schedule.vbar:
        return R, v, _zero_weights(geometry)
    return R, v, regularization(geometry, schedule, R, STEPPER_CHECK).weights


def _hff(geometry, schedule, R, v, weights, driving=True) -> np.ndarray:
    zz, xx = ising_parts(geometry)
    H = schedule.coupling(R) * zz - 0.5 * schedule.field(R) * xx
    if not driving or v == 0.0:
        return H.astype(complex)
    x = weights.as_vector(geometry.q_included)
    return H + 1j * v * np.tensordot(x, reg_generators(geometry), axes=1)


def build_hff(geometry: ClusterGeometry, schedule: Schedule, t: float) -> np.ndarray:
    """H0(R(t)) + v(t) * H~(R(t))."""
    R, v, w = driving_weights(geometry, schedule, t)
    return _hff(geometry, schedule, R, v, w)


@dataclass
class EvolutionRecord:
    t: float
    R: float
    J: float
    Bx: float
    v: float
    weights: RegWeights
    amplitudes: np.ndarray = field(repr=False)
    norm: float
    fidelity: float


def fidelity(
    psi: np.ndarray, geometry: ClusterGeometry, schedule: Schedule, t: float
) -> float:
    """Squared overlap of psi with the instantaneous ground state.

    Should the symmetric-sector ground level ever be degenerate, the overlap
    is taken with the whole lowest eigenspace of H0 instead.
    """
    R = schedule.advanced_R(t)
    J, Bx = schedule.coupling(R), schedule.field(R)
    gs = ground_state(geometry, J, Bx)
    if gs.gap >= GAP_THRESHOLD:
        return float(min(1.0, abs(np.vdot(gs.components, psi)) ** 2))
    w, vecs = np.linalg.eigh(build_h0(geometry, J, Bx))
    low = vecs[:, w - w[0] < GAP_THRESHOLD]
    return float(min(1.0, np.sum(np.abs(low.T @ psi) ** 2)))


def initial_state(geometry: ClusterGeometry, schedule: Schedule) -> np.ndarray:
    R = schedule.R0
    gs = ground_state(geometry, schedule.coupling(R), schedule.field(R))
    return gs.components.astype(complex)


def evolve(
    geometry: ClusterGeometry,
    schedule: Schedule,
    steps: int = DEFAULT_STEPS,
    stride: int | None = None,
    driving: bool = True,
    norm_limit: float = NORM_DRIFT_LIMIT,
) -> list[EvolutionRecord]:
    """Integrate i dpsi/dt = H_FF(t) psi over [0, Tff] with fixed-step RK4.

    The driving strengths are re-solved at every distinct stage time. A
    record is emitted at t = 0 and after every ``stride`` steps (default:
    ``steps // 100``). ``driving=False`` evolves under H0 alone.
    """
    if steps < 1000:
        raise ValueError("steps must be at least 1000")
    if stride is None:
        stride = max(1, steps // 100)
    if stride < 1 or steps % stride:
        raise ValueError("stride must be a positive divisor of steps")
    dt = schedule.Tff / steps
    zz, xx = ising_parts(geometry)
    gens = reg_generators(geometry)
    flat_gens = gens.reshape(len(gens), -1)
    n_pair = len(geometry.w_classes)
    v_skip = V_SKIP * schedule.vbar

    def stage(t):
        R = schedule.advanced_R(t)
        v = schedule.velocity(t)
        J, Bx = schedule.coupling(R), schedule.field(R)
        H = (J * zz - 0.5 * Bx * xx).astype(complex)
        if driving and abs(v) > v_skip:
            x = strengths(geometry, J, Bx, schedule.dJ_dR, schedule.dBx_dR, STEPPER_CHECK)
            H += (1j * v) * (x @ flat_gens).reshape(H.shape)
        else:
            x = np.zeros(len(gens))
        return R, v, x, H

    def record(t, psi, st):
        R, v, x, _ = st
        norm = float(np.linalg.norm(psi))
        q = float(x[n_pair]) if geometry.q_included else 0.0
        return EvolutionRecord(
            t=t, R=R, J=schedule.coupling(R), Bx=schedule.field(R), v=v,
            weights=RegWeights(tuple(x[:n_pair]), q),
            amplitudes=psi.copy(), norm=norm,
            fidelity=fidelity(psi / norm, geometry, schedule, t),
        )

    psi = initial_state(geometry, schedule)
    cur = stage(0.0)
    records = [record(0.0, psi, cur)]
    for n in range(steps):
        t = n * dt
        mid = stage(t + 0.5 * dt)
        nxt = stage((n + 1) * dt)
        H0, Hm, H1 = cur[3], mid[3], nxt[3]
        k1 = -1j * (H0 @ psi)
        k2 = -1j * (Hm @ (psi + 0.5 * dt * k1))
        k3 = -1j * (Hm @ (psi + 0.5 * dt * k2))
        k4 = -1j * (H1 @ (psi + dt * k3))
        psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        cur = nxt
        if (n + 1) % stride == 0:
            drift = abs(np.linalg.norm(psi) - 1.0)
            if drift > norm_limit:
                raise StepSizeError(
                    f"norm drift {drift:.2e} at t={(n + 1) * dt:.6g}; "
                    f"increase steps (dt={dt:.3g})"
                )
            records.append(record((n + 1) * dt, psi, cur))
    return records


def spectrum_at(geometry: ClusterGeometry, schedule: Schedule, t: float) -> np.ndarray:
    R = schedule.advanced_R(t)
    return np.linalg.eigvalsh(build_h0(geometry, schedule.coupling(R), schedule.field(R)))


__all__ = [
    "Schedule", "EvolutionRecord", "velocity", "advanced_R", "build_hff",
    "evolve", "fidelity", "driving_weights", "initial_state", "spectrum_at",
]
