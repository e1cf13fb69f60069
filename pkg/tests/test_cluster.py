import itertools
from math import comb

import numpy as np
import pytest

from ffclusters.cluster import (
    GEOMETRIES,
    all_pairs,
    basis_order,
    catalog,
    component_class_of,
)
from ffclusters.errors import UnknownGeometryError
from ffclusters.groundstate import ground_numeric
from ffclusters.operators import build_h0


def symmetry_orbits(geo):
    """Orbits of basis states under graph automorphisms and global flip."""
    n = geo.n_sites
    edges = {frozenset(e) for e in geo.h0_edges}
    autos = []
    for perm in itertools.permutations(range(1, n + 1)):
        m = dict(zip(range(1, n + 1), perm))
        if {frozenset((m[a], m[b])) for a, b in edges} == edges:
            autos.append(m)
    index = {cfg: k + 1 for k, cfg in enumerate(geo.basis_order)}
    orbits = set()
    for cfg in geo.basis_order:
        orbit = set()
        for m in autos:
            image = [0] * n
            for site in range(1, n + 1):
                image[m[site] - 1] = cfg[site - 1]
            for sign in (1, -1):
                orbit.add(index[tuple(sign * s for s in image)])
        orbits.add(tuple(sorted(orbit)))
    return orbits


def test_catalog_examples():
    tri = catalog("triangle")
    assert tri.w_classes == (((1, 2), (1, 3), (2, 3)),) or set(tri.w_classes[0]) == {
        (1, 2), (2, 3), (1, 3)
    }
    assert len(tri.w_classes) == 1 and not tri.q_included

    ch4 = catalog("chain4")
    assert [set(c) for c in ch4.w_classes] == [
        {(1, 2), (3, 4)}, {(2, 3)}, {(1, 3), (2, 4)}, {(1, 4)}
    ]
    assert ch4.q_included

    assert set(catalog("star").h0_edges) == {(1, 2), (2, 3), (2, 4)}


def test_unknown_geometry():
    with pytest.raises(UnknownGeometryError):
        catalog("hexagon")
    with pytest.raises(ValueError):
        catalog("hexagon")


@pytest.mark.parametrize("name", GEOMETRIES)
def test_pair_classes_partition_all_pairs(name):
    geo = catalog(name)
    flat = [p for cls in geo.w_classes for p in cls]
    assert sum(len(c) for c in geo.w_classes) == comb(geo.n_sites, 2)
    assert sorted(flat) == sorted(all_pairs(geo.n_sites))
    assert geo.q_included == (geo.n_sites == 4)


@pytest.mark.parametrize("n", [3, 4])
def test_basis_order_is_bijection(n):
    order = basis_order(n)
    assert len(set(order)) == 2**n
    assert set(order) == set(itertools.product((1, -1), repeat=n))
    assert order[0] == (1,) * n and order[-1] == (-1,) * n
    downs = [cfg.count(-1) for cfg in order]
    assert downs == sorted(downs)


@pytest.mark.parametrize(
    "name, idx, expected",
    [
        ("pyramid", 7, {6, 7, 8, 9, 10, 11}),
        ("chain4", 13, {3, 4, 13, 14}),
        ("triangle", 1, {1, 8}),
    ],
)
def test_component_class_examples(name, idx, expected):
    geo = catalog(name)
    cls = geo.component_classes[component_class_of(geo, idx)]
    assert set(cls) == expected


def test_component_class_out_of_range():
    with pytest.raises(IndexError):
        component_class_of(catalog("triangle"), 9)
    with pytest.raises(IndexError):
        component_class_of(catalog("triangle"), 0)


@pytest.mark.parametrize("name", GEOMETRIES)
def test_component_classes_are_symmetry_orbits(name):
    geo = catalog(name)
    assert set(geo.component_classes) == symmetry_orbits(geo)


@pytest.mark.parametrize("name", GEOMETRIES)
def test_component_classes_match_numeric_ground_state(name):
    geo = catalog(name)
    rng = np.random.default_rng(7)
    eps = np.finfo(float).eps
    for J, Bx in rng.uniform([0.0, 0.05], [10.0, 10.0], size=(50, 2)):
        H = build_h0(geo, J, Bx)
        gs = ground_numeric(H)
        # eigenvector perturbation bound; only bites when the full-space gap
        # collapses at small Bx
        tol = 1e-12 + 64 * eps * np.linalg.norm(H, 2) / gs.gap
        for cls in geo.component_classes:
            assert np.ptp(gs.components[np.array(cls) - 1]) <= tol


def test_class_helpers():
    geo = catalog("square")
    assert geo.representatives() == (1, 2, 6, 10)
    assert sum(geo.multiplicities()) == 16
    assert geo.w_class_of(4, 1) == 0 and geo.w_class_of(1, 3) == 1
