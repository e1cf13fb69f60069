import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffclusters.cluster import GEOMETRIES, basis_order, catalog
from ffclusters.operators import (
    GOLDEN_GEOMETRIES,
    RegWeights,
    _GOLDEN_TABLES,
    build_h0,
    build_reg,
    global_flip,
    golden_reg_matrix,
    pauli_string,
    single_site,
    three_body_term,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def random_weights(geo, rng):
    w = tuple(rng.normal(size=len(geo.w_classes)))
    return RegWeights(w, float(rng.normal()) if geo.q_included else 0.0)


def basis_vec(n, idx):
    e = np.zeros(2**n, dtype=complex)
    e[idx - 1] = 1.0
    return e


def test_single_site_examples():
    up = basis_vec(3, 1)
    assert np.array_equal(single_site(3, 1, "z") @ up, up)
    target = basis_order(3).index((1, -1, 1)) + 1
    assert target == 3
    assert np.array_equal(single_site(3, 2, "x") @ up, basis_vec(3, 3))


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("axis", "xyz")
def test_pauli_involution(n, axis):
    for site in range(1, n + 1):
        s = single_site(n, site, axis)
        assert np.allclose(s @ s, np.eye(2**n), atol=0)


def test_pauli_anticommute_and_product():
    x, y, z = (single_site(3, 2, a) for a in "xyz")
    assert np.allclose(x @ y, 1j * z)
    assert np.allclose(x @ y + y @ x, 0)
    # distinct sites commute
    assert np.allclose(single_site(3, 1, "y") @ y, y @ single_site(3, 1, "y"))
    assert np.allclose(pauli_string(3, {1: "y", 2: "y"}), single_site(3, 1, "y") @ y)


@pytest.mark.parametrize("bad", [(3, 0, "x"), (3, 4, "z"), (3, 1, "w")])
def test_single_site_validation(bad):
    with pytest.raises(ValueError):
        single_site(*bad)


def test_h0_examples():
    tri = catalog("triangle")
    assert not build_h0(tri, 0, 0).any()
    H = build_h0(tri, 1.7, 3.0)
    assert H[0, 0] == pytest.approx(3 * 1.7)
    ch = build_h0(catalog("chain3"), 1.0, 0.0)
    assert np.count_nonzero(ch - np.diag(np.diag(ch))) == 0
    assert ch[0, 0] == 2 and ch[-1, -1] == 2


def test_reg_triangle_element():
    W = 0.37
    Ht = build_reg(catalog("triangle"), RegWeights((W,)))
    for j in (2, 3, 4):
        assert Ht[0, j - 1] == pytest.approx(-2j * W)
        assert Ht[j - 1, 0] == pytest.approx(2j * W)


def test_reg_pyramid_three_body_element():
    Q = 0.61
    Ht = build_reg(catalog("pyramid"), RegWeights((0.0,), Q))
    for j in range(6, 12):
        assert Ht[0, j - 1] == pytest.approx(-4j * Q)
        assert Ht[15, j - 1] == pytest.approx(-4j * Q)


def test_three_body_has_twelve_terms():
    # 4 triples x 3 choices of the z site
    T = three_body_term(4)
    assert np.allclose(T, T.conj().T)
    assert np.abs(T[0, 5]) == pytest.approx(4.0)


def test_reg_validation():
    with pytest.raises(ValueError):
        build_reg(catalog("chain4"), RegWeights((1.0, 2.0)))
    with pytest.raises(ValueError):
        build_reg(catalog("chain3"), RegWeights((1.0, 2.0), 0.5))


@pytest.mark.parametrize(
    "name, w, pos, expected",
    [
        ("square", (0.3, 0.7), (1, 2), -1j * (2 * 0.3 + 0.7)),
        ("star", (0.3, 0.7), (1, 4), -1j * 3 * 0.3),
        ("chain3", (0.3, 0.7), (1, 3), -2j * 0.3),
    ],
)
def test_golden_examples(name, w, pos, expected):
    M = golden_reg_matrix(catalog(name), RegWeights(w))
    assert M[pos[0] - 1, pos[1] - 1] == pytest.approx(expected)


@pytest.mark.parametrize("name", GOLDEN_GEOMETRIES)
def test_build_matches_golden(name):
    geo = catalog(name)
    rng = np.random.default_rng(11)
    for _ in range(100):
        wts = random_weights(geo, rng)
        assert np.abs(build_reg(geo, wts) - golden_reg_matrix(geo, wts)).max() <= 1e-15


def test_chain4_without_q_matches_reference():
    geo = catalog("chain4")
    wts = RegWeights((0.1, -0.4, 0.9, 0.25))
    assert np.array_equal(build_reg(geo, wts), golden_reg_matrix(geo, wts))


def test_golden_detects_sign_flip():
    geo = catalog("chain4")
    bad = dict(_GOLDEN_TABLES)
    bad["chain4"] = bad["chain4"].replace("-A4", "A4", 1)
    wts = RegWeights((0.1, -0.4, 0.9, 0.25), 0.3)
    diff = build_reg(geo, wts) - golden_reg_matrix(geo, wts, tables=bad)
    assert np.abs(diff).max() > 0.1


@pytest.mark.parametrize("name", GEOMETRIES)
def test_hermitian_and_flip_symmetric(name):
    geo = catalog(name)
    rng = np.random.default_rng(3)
    X = global_flip(geo.n_sites)
    for _ in range(10):
        H0 = build_h0(geo, *rng.uniform(-5, 5, 2))
        Ht = build_reg(geo, random_weights(geo, rng))
        for M in (H0, Ht):
            assert np.abs(M - M.conj().T).max() <= 1e-15
            assert np.abs(X @ M @ X - M).max() <= 1e-15


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(GEOMETRIES), finite, finite, st.lists(finite, min_size=5, max_size=5))
def test_operators_linear_and_hermitian(name, J, Bx, ws):
    geo = catalog(name)
    k = len(geo.w_classes)
    wts = RegWeights(tuple(ws[:k]), ws[4] if geo.q_included else 0.0)
    Ht = build_reg(geo, wts)
    assert np.allclose(Ht, Ht.conj().T, atol=1e-12)
    assert np.allclose(Ht.real, 0)
    assert np.allclose(build_h0(geo, J, Bx), build_h0(geo, J, 0) + build_h0(geo, 0, Bx))
