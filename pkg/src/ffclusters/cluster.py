"""Static data for the six spin clusters.

Sites are numbered from 1. Basis states are numbered from 1 in the grouped
order used throughout the package (all-up first, then by number of down
spins); a configuration is a tuple of sigma^z eigenvalues, +1 for up and -1
for down.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .errors import UnknownGeometryError

GEOMETRIES = ("triangle", "chain3", "pyramid", "square", "star", "chain4")

_BASIS_LABELS = {
    3: ("uuu", "uud", "udu", "duu", "udd", "dud", "ddu", "ddd"),
    4: (
        "uuuu", "uuud", "uudu", "uduu", "duuu",
        "uudd", "uddu", "dduu", "duud", "udud", "dudu",
        "dddu", "ddud", "dudd", "uddd", "dddd",
    ),
}

Pair = tuple[int, int]
Config = tuple[int, ...]


def _config(label: str) -> Config:
    return tuple(1 if ch == "u" else -1 for ch in label)


def basis_order(n_sites: int) -> tuple[Config, ...]:
    try:
        labels = _BASIS_LABELS[n_sites]
    except KeyError:
        raise ValueError(f"no basis table for {n_sites} sites") from None
    return tuple(_config(lab) for lab in labels)


@dataclass(frozen=True)
class ClusterGeometry:
    name: str
    n_sites: int
    h0_edges: tuple[Pair, ...]
    w_classes: tuple[tuple[Pair, ...], ...]
    q_included: bool
    basis_order: tuple[Config, ...]
    component_classes: tuple[tuple[int, ...], ...]

    # names are unique; hashing every field is slow in the cached builders
    def __hash__(self):
        return hash(self.name)

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites

    @property
    def n_unknowns(self) -> int:
        return len(self.w_classes) + int(self.q_included)

    def w_class_of(self, i: int, j: int) -> int:
        """Index of the pair class containing the unordered pair (i, j)."""
        key = (min(i, j), max(i, j))
        for idx, members in enumerate(self.w_classes):
            if key in members:
                return idx
        raise ValueError(f"pair {key} not in any class of {self.name}")

    def representatives(self) -> tuple[int, ...]:
        """Smallest basis index of each component class."""
        return tuple(cls[0] for cls in self.component_classes)

    def multiplicities(self) -> tuple[int, ...]:
        return tuple(len(cls) for cls in self.component_classes)


_ALL3 = tuple(combinations(range(1, 4), 2))
_ALL4 = tuple(combinations(range(1, 5), 2))

# name: (n_sites, h0 edges, pair classes, component classes)
_TABLE = {
    "triangle": (
        3,
        ((1, 2), (2, 3), (1, 3)),
        (((1, 2), (2, 3), (1, 3)),),
        ((1, 8), (2, 3, 4, 5, 6, 7)),
    ),
    "chain3": (
        3,
        ((1, 2), (2, 3)),
        (((1, 2), (2, 3)), ((1, 3),)),
        ((1, 8), (2, 4, 5, 7), (3, 6)),
    ),
    "pyramid": (
        4,
        _ALL4,
        (_ALL4,),
        ((1, 16), (2, 3, 4, 5, 12, 13, 14, 15), (6, 7, 8, 9, 10, 11)),
    ),
    "square": (
        4,
        ((1, 2), (2, 3), (3, 4), (1, 4)),
        (((1, 2), (2, 3), (3, 4), (1, 4)), ((1, 3), (2, 4))),
        ((1, 16), (2, 3, 4, 5, 12, 13, 14, 15), (6, 7, 8, 9), (10, 11)),
    ),
    # hub is site 2
    "star": (
        4,
        ((1, 2), (2, 3), (2, 4)),
        (((1, 2), (2, 3), (2, 4)), ((1, 3), (1, 4), (3, 4))),
        ((1, 16), (2, 3, 5, 12, 13, 15), (4, 14), (6, 7, 8, 9, 10, 11)),
    ),
    "chain4": (
        4,
        ((1, 2), (2, 3), (3, 4)),
        (((1, 2), (3, 4)), ((2, 3),), ((1, 3), (2, 4)), ((1, 4),)),
        ((1, 16), (2, 5, 12, 15), (3, 4, 13, 14), (6, 8), (7, 9), (10, 11)),
    ),
}


@lru_cache(maxsize=None)
def catalog(name: str) -> ClusterGeometry:
    """Return the static description of a named cluster."""
    try:
        n, edges, wcls, ccls = _TABLE[name]
    except (KeyError, TypeError):
        raise UnknownGeometryError(
            f"unknown geometry {name!r}; expected one of {', '.join(GEOMETRIES)}"
        ) from None
    return ClusterGeometry(
        name=name,
        n_sites=n,
        h0_edges=edges,
        w_classes=wcls,
        q_included=(n == 4),
        basis_order=basis_order(n),
        component_classes=ccls,
    )


def component_class_of(geometry: ClusterGeometry, basis_index: int) -> int:
    if not 1 <= basis_index <= geometry.dim:
        raise IndexError(f"basis index {basis_index} outside 1..{geometry.dim}")
    for cid, members in enumerate(geometry.component_classes):
        if basis_index in members:
            return cid
    raise AssertionError("component classes do not cover the basis")  # pragma: no cover


def all_pairs(n_sites: int) -> tuple[Pair, ...]:
    return _ALL3 if n_sites == 3 else _ALL4
