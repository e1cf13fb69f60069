"""Dense spin operators in the grouped configuration basis.

Everything is built by acting directly on basis configurations, so matrix
rows and columns follow ``geometry.basis_order`` without any permutation
step. Energies are dimensionless with hbar = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .cluster import ClusterGeometry, basis_order


@dataclass(frozen=True)
class RegWeights:
    """Pair strengths per class of the geometry plus the 3-body strength."""

    w: tuple[float, ...]
    q: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(x) for x in self.w))
        object.__setattr__(self, "q", float(self.q))

    def as_vector(self, with_q: bool) -> np.ndarray:
        return np.array(self.w + ((self.q,) if with_q else ()))


@lru_cache(maxsize=None)
def _index(n_sites: int) -> dict:
    return {cfg: k for k, cfg in enumerate(basis_order(n_sites))}


@lru_cache(maxsize=None)
def _single_site(n_sites: int, site: int, axis: str) -> np.ndarray:
    configs = basis_order(n_sites)
    index = _index(n_sites)
    dim = len(configs)
    out = np.zeros((dim, dim), dtype=complex)
    s = site - 1
    for col, cfg in enumerate(configs):
        spin = cfg[s]
        if axis == "z":
            out[col, col] = spin
            continue
        flipped = cfg[:s] + (-spin,) + cfg[s + 1:]
        row = index[flipped]
        # sigma^y |up> = i|down>, sigma^y |down> = -i|up>
        out[row, col] = 1.0 if axis == "x" else 1j * spin
    out.setflags(write=False)
    return out


def single_site(n_sites: int, site: int, axis: str) -> np.ndarray:
    """Pauli matrix ``axis`` on ``site`` embedded in the 2^N space."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} outside 1..{n_sites}")
    if axis not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    return _single_site(n_sites, site, axis).copy()


def pauli_string(n_sites: int, factors: dict[int, str]) -> np.ndarray:
    out = np.eye(2 ** n_sites, dtype=complex)
    for site, axis in factors.items():
        out = out @ _single_site(n_sites, site, axis)
    return out


@lru_cache(maxsize=None)
def ising_parts(geometry: ClusterGeometry) -> tuple[np.ndarray, np.ndarray]:
    """(sum of sz sz over bonds, sum of sx over sites) as real matrices."""
    n = geometry.n_sites
    zz = sum(pauli_string(n, {i: "z", j: "z"}) for i, j in geometry.h0_edges)
    xx = sum(_single_site(n, i, "x") for i in range(1, n + 1))
    zz, xx = zz.real.copy(), xx.real.copy()
    zz.setflags(write=False)
    xx.setflags(write=False)
    return zz, xx


def build_h0(geometry: ClusterGeometry, J: float, Bx: float) -> np.ndarray:
    zz, xx = ising_parts(geometry)
    return J * zz - 0.5 * Bx * xx


def pair_term(n_sites: int, i: int, j: int) -> np.ndarray:
    return pauli_string(n_sites, {i: "y", j: "z"}) + pauli_string(n_sites, {i: "z", j: "y"})


def three_body_term(n_sites: int) -> np.ndarray:
    """Universal 3-body operator with unit strength.

    Every site triple contributes once per choice of the sz site, with the
    remaining two sites entering the symmetric (xy + yx) factor.
    """
    total = np.zeros((2 ** n_sites,) * 2, dtype=complex)
    for triple in combinations(range(1, n_sites + 1), 3):
        for k in triple:
            i, j = (s for s in triple if s != k)
            total += pauli_string(n_sites, {i: "x", j: "y", k: "z"})
            total += pauli_string(n_sites, {i: "y", j: "x", k: "z"})
    return total


@lru_cache(maxsize=None)
def reg_generators(geometry: ClusterGeometry) -> np.ndarray:
    """Stack of operator / i for each unknown (pair classes, then Q).

    The regularization operators are i times a real antisymmetric matrix; the
    real factor is what gets stored, shape ``(n_unknowns, dim, dim)``.
    """
    n = geometry.n_sites
    mats = [sum(pair_term(n, i, j) for i, j in cls) for cls in geometry.w_classes]
    if geometry.q_included:
        mats.append(three_body_term(n))
    stack = np.array([(m / 1j).real for m in mats])
    stack.setflags(write=False)
    return stack


def _check_weights(geometry: ClusterGeometry, weights: RegWeights) -> None:
    if len(weights.w) != len(geometry.w_classes):
        raise ValueError(
            f"{geometry.name} needs {len(geometry.w_classes)} pair strengths, "
            f"got {len(weights.w)}"
        )


def build_reg(geometry: ClusterGeometry, weights: RegWeights) -> np.ndarray:
    """Regularization Hamiltonian for the given strengths.

    The 3-body strength is ignored for clusters without the 3-body term only
    if it is zero; a nonzero ``q`` there is an error.
    """
    _check_weights(geometry, weights)
    gens = reg_generators(geometry)
    coeffs = list(weights.w)
    if geometry.q_included:
        coeffs.append(weights.q)
    elif weights.q != 0.0:
        raise ValueError(f"{geometry.name} has no 3-body term; q must be 0")
    return 1j * np.tensordot(coeffs, gens, axes=1)


def global_flip(n_sites: int) -> np.ndarray:
    """Permutation matrix flipping every spin."""
    configs = basis_order(n_sites)
    index = _index(n_sites)
    out = np.zeros((len(configs),) * 2)
    for col, cfg in enumerate(configs):
        out[index[tuple(-s for s in cfg)], col] = 1.0
    return out


# Hand-entered reference regularization matrices (factor i
# removed). Entries are symbolic names resolved through _combinations below.

_GOLDEN_TABLES = {
    "chain3": """
        0 -A1 -A2 -A1 0 0 0 0
        A1 0 0 0 0 -A3 0 0
        A2 0 0 0 A3 0 A3 0
        A1 0 0 0 0 -A3 0 0
        0 0 -A3 0 0 0 0 A1
        0 A3 0 A3 0 0 0 A2
        0 0 -A3 0 0 0 0 A1
        0 0 0 0 -A1 -A2 -A1 0
    """,
    "pyramid": """
        0 -A1 -A1 -A1 -A1 0 0 0 0 0 0 0 0 0 0 0
        A1 0 0 0 0 -A2 0 0 -A2 -A2 0 0 0 0 0 0
        A1 0 0 0 0 -A2 -A2 0 0 0 -A2 0 0 0 0 0
        A1 0 0 0 0 0 -A2 -A2 0 -A2 0 0 0 0 0 0
        A1 0 0 0 0 0 0 -A2 -A2 0 -A2 0 0 0 0 0
        0 A2 A2 0 0 0 0 0 0 0 0 0 0 A2 A2 0
        0 0 A2 A2 0 0 0 0 0 0 0 A2 0 0 A2 0
        0 0 0 A2 A2 0 0 0 0 0 0 A2 A2 0 0 0
        0 A2 0 0 A2 0 0 0 0 0 0 0 A2 A2 0 0
        0 A2 0 A2 0 0 0 0 0 0 0 0 A2 0 A2 0
        0 0 A2 0 A2 0 0 0 0 0 0 A2 0 A2 0 0
        0 0 0 0 0 0 -A2 -A2 0 0 -A2 0 0 0 0 A1
        0 0 0 0 0 0 0 -A2 -A2 -A2 0 0 0 0 0 A1
        0 0 0 0 0 -A2 0 0 -A2 0 -A2 0 0 0 0 A1
        0 0 0 0 0 -A2 -A2 0 0 -A2 0 0 0 0 0 A1
        0 0 0 0 0 0 0 0 0 0 0 -A1 -A1 -A1 -A1 0
    """,
    "square": """
        0 -A1 -A1 -A1 -A1 0 0 0 0 0 0 0 0 0 0 0
        A1 0 0 0 0 -A2 0 0 -A2 -A3 0 0 0 0 0 0
        A1 0 0 0 0 -A2 -A2 0 0 0 -A3 0 0 0 0 0
        A1 0 0 0 0 0 -A2 -A2 0 -A3 0 0 0 0 0 0
        A1 0 0 0 0 0 0 -A2 -A2 0 -A3 0 0 0 0 0
        0 A2 A2 0 0 0 0 0 0 0 0 0 0 A2 A2 0
        0 0 A2 A2 0 0 0 0 0 0 0 A2 0 0 A2 0
        0 0 0 A2 A2 0 0 0 0 0 0 A2 A2 0 0 0
        0 A2 0 0 A2 0 0 0 0 0 0 0 A2 A2 0 0
        0 A3 0 A3 0 0 0 0 0 0 0 0 A3 0 A3 0
        0 0 A3 0 A3 0 0 0 0 0 0 A3 0 A3 0 0
        0 0 0 0 0 0 -A2 -A2 0 0 -A3 0 0 0 0 A1
        0 0 0 0 0 0 0 -A2 -A2 -A3 0 0 0 0 0 A1
        0 0 0 0 0 -A2 0 0 -A2 0 -A3 0 0 0 0 A1
        0 0 0 0 0 -A2 -A2 0 0 -A3 0 0 0 0 0 A1
        0 0 0 0 0 0 0 0 0 0 0 -A1 -A1 -A1 -A1 0
    """,
    "star": """
        0 -A1 -A1 -A2 -A1 0 0 0 0 0 0 0 0 0 0 0
        A1 0 0 0 0 -A3 0 0 -A3 -A3 0 0 0 0 0 0
        A1 0 0 0 0 -A3 -A3 0 0 0 -A3 0 0 0 0 0
        A2 0 0 0 0 0 A4 A4 0 A4 0 0 0 0 0 0
        A1 0 0 0 0 0 0 -A3 -A3 0 -A3 0 0 0 0 0
        0 A3 A3 0 0 0 0 0 0 0 0 0 0 -A4 A3 0
        0 0 A3 -A4 0 0 0 0 0 0 0 A3 0 0 A3 0
        0 0 0 -A4 A3 0 0 0 0 0 0 A3 A3 0 0 0
        0 A3 0 0 A3 0 0 0 0 0 0 0 A3 -A4 0 0
        0 A3 0 -A4 0 0 0 0 0 0 0 0 A3 0 A3 0
        0 0 A3 0 A3 0 0 0 0 0 0 A3 0 -A4 0 0
        0 0 0 0 0 0 -A3 -A3 0 0 -A3 0 0 0 0 A1
        0 0 0 0 0 0 0 -A3 -A3 -A3 0 0 0 0 0 A1
        0 0 0 0 0 A4 0 0 A4 0 A4 0 0 0 0 A2
        0 0 0 0 0 -A3 -A3 0 0 -A3 0 0 0 0 0 A1
        0 0 0 0 0 0 0 0 0 0 0 -A1 -A1 -A2 -A1 0
    """,
    "chain4": """
        0 -A1 -A2 -A2 -A1 0 0 0 0 0 0 0 0 0 0 0
        A1 0 0 0 0 -A3 0 0 -A4 -A5 0 0 0 0 0 0
        A2 0 0 0 0 -A6 -A7 0 0 0 -A8 0 0 0 0 0
        A2 0 0 0 0 0 -A7 -A6 0 -A8 0 0 0 0 0 0
        A1 0 0 0 0 0 0 -A3 -A4 0 -A5 0 0 0 0 0
        0 A3 A6 0 0 0 0 0 0 0 0 0 0 A6 A3 0
        0 0 A7 A7 0 0 0 0 0 0 0 A4 0 0 A4 0
        0 0 0 A6 A3 0 0 0 0 0 0 A3 A6 0 0 0
        0 A4 0 0 A4 0 0 0 0 0 0 0 A7 A7 0 0
        0 A5 0 A8 0 0 0 0 0 0 0 0 A8 0 A5 0
        0 0 A8 0 A5 0 0 0 0 0 0 A5 0 A8 0 0
        0 0 0 0 0 0 -A4 -A3 0 0 -A5 0 0 0 0 A1
        0 0 0 0 0 0 0 -A6 -A7 -A8 0 0 0 0 0 A2
        0 0 0 0 0 -A6 0 0 -A7 0 -A8 0 0 0 0 A2
        0 0 0 0 0 -A3 -A4 0 0 -A5 0 0 0 0 0 A1
        0 0 0 0 0 0 0 0 0 0 0 -A1 -A2 -A2 -A1 0
    """,
}


def _combinations(name: str, w: tuple[float, ...]) -> dict[str, float]:
    if name == "chain3":
        w1, w2 = w
        return {"A1": w1 + w2, "A2": 2 * w1, "A3": w1 - w2}
    if name == "pyramid":
        (w1,) = w
        return {"A1": 3 * w1, "A2": w1}
    if name == "square":
        w1, w2 = w
        return {"A1": 2 * w1 + w2, "A2": w2, "A3": 2 * w1 - w2}
    if name == "star":
        w1, w2 = w
        return {"A1": 2 * w2 + w1, "A2": 3 * w1, "A3": w1, "A4": w1 - 2 * w2}
    w1, w2, w3, w4 = w
    return {
        "A1": w1 + w3 + w4,
        "A2": w1 + w2 + w3,
        "A3": w2 - w1 + w3,
        "A4": w1 - w4 + w3,
        "A5": w1 + w2 - w3,
        "A6": -w1 + w4 + w3,
        "A7": w1 - w2 + w3,
        "A8": w1 + w4 - w3,
    }


def _parse_table(text: str, values: dict[str, float]) -> np.ndarray:
    rows = [line.split() for line in text.strip().splitlines()]
    out = np.zeros((len(rows), len(rows)))
    for r, tokens in enumerate(rows):
        if len(tokens) != len(rows):
            raise ValueError(f"row {r + 1} has {len(tokens)} entries")
        for c, tok in enumerate(tokens):
            if tok == "0":
                continue
            sign = -1.0 if tok.startswith("-") else 1.0
            out[r, c] = sign * values[tok.lstrip("-")]
    return out


def golden_reg_matrix(
    geometry: ClusterGeometry, weights: RegWeights, tables: dict | None = None
) -> np.ndarray:
    """Regularization matrix assembled from the reference element tables.

    For four-site clusters the 3-body strength enters only through the
    all-up/all-down rows and columns against the two-down states 6..11.
    ``tables`` overrides the built-in tables (used to check that a
    corrupted table is detected).
    """
    tables = _GOLDEN_TABLES if tables is None else tables
    if geometry.name not in tables:
        raise ValueError(f"no reference matrix for {geometry.name}")
    _check_weights(geometry, weights)
    real = _parse_table(tables[geometry.name], _combinations(geometry.name, weights.w))
    if geometry.q_included:
        q = weights.q
        last = geometry.dim - 1
        for j in range(5, 11):
            real[0, j] -= 4 * q
            real[last, j] -= 4 * q
            real[j, 0] += 4 * q
            real[j, last] += 4 * q
    elif weights.q != 0.0:
        raise ValueError(f"{geometry.name} has no 3-body term; q must be 0")
    return 1j * real


GOLDEN_GEOMETRIES = tuple(_GOLDEN_TABLES)
