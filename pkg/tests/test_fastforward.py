import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import REFERENCE, reference_run
from ffclusters.cluster import GEOMETRIES, catalog
from ffclusters.errors import StepSizeError
from ffclusters.fastforward import (
    Schedule,
    advanced_R,
    build_hff,
    driving_weights,
    evolve,
    fidelity,
    velocity,
)
from ffclusters.groundstate import ground_state
from ffclusters.operators import build_h0


def test_velocity_examples():
    assert velocity(REFERENCE, 0.0) == 0.0
    assert velocity(REFERENCE, REFERENCE.Tff / 2) == pytest.approx(200.0, abs=1e-12)
    assert velocity(REFERENCE, REFERENCE.Tff) == 0.0


def test_advanced_time_examples():
    assert advanced_R(REFERENCE, 0.0) == REFERENCE.R0
    assert advanced_R(REFERENCE, REFERENCE.Tff / 2) == pytest.approx(5.0, abs=1e-12)
    assert advanced_R(REFERENCE, REFERENCE.Tff) == 10.0
    assert REFERENCE.field(advanced_R(REFERENCE, REFERENCE.Tff)) == 0.0


@pytest.mark.parametrize("t", [-1e-3, 0.1001])
def test_time_out_of_range(t):
    with pytest.raises(ValueError):
        velocity(REFERENCE, t)
    with pytest.raises(ValueError):
        advanced_R(REFERENCE, t)


@pytest.mark.parametrize("kw", [{"Tff": 0.0}, {"vbar": -1.0}, {"B0": float("nan")}])
def test_schedule_validation(kw):
    with pytest.raises(ValueError):
        Schedule(**kw)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0))
def test_schedule_consistency(frac):
    t = frac * REFERENCE.Tff
    h = 1e-7 * REFERENCE.Tff
    lo, hi = max(0.0, t - h), min(REFERENCE.Tff, t + h)
    slope = (advanced_R(REFERENCE, hi) - advanced_R(REFERENCE, lo)) / (hi - lo)
    assert slope == pytest.approx(velocity(REFERENCE, t), abs=1e-4 * REFERENCE.vbar)
    assert 0.0 <= velocity(REFERENCE, t) <= 2 * REFERENCE.vbar


@pytest.mark.parametrize("name", GEOMETRIES)
def test_hff_boundaries_exact(name):
    geo = catalog(name)
    assert np.array_equal(build_hff(geo, REFERENCE, 0.0), build_h0(geo, 0.0, 10.0))
    assert np.array_equal(build_hff(geo, REFERENCE, REFERENCE.Tff), build_h0(geo, 10.0, 0.0))


def test_hff_hermitian_mid_sweep():
    H = build_hff(catalog("star"), REFERENCE, 0.037)
    assert np.abs(H - H.conj().T).max() <= 1e-13


def test_triangle_drive_shape():
    geo = catalog("triangle")
    ts = np.linspace(0, REFERENCE.Tff, 201)
    vw = np.array([v * w.w[0] for _, v, w in (driving_weights(geo, REFERENCE, t) for t in ts)])
    assert vw[0] == 0.0 and vw[-1] == 0.0
    interior = vw[1:-1]
    assert np.all(interior > 0)
    slope = np.sign(np.diff(vw))
    assert np.count_nonzero(np.diff(slope[slope != 0])) == 1


def test_fidelity_trivial_cases():
    geo = catalog("square")
    C = ground_state(geo, REFERENCE.coupling(3.0), REFERENCE.field(3.0)).components
    t = 0.0
    C0 = ground_state(geo, 0.0, 10.0).components
    assert fidelity(C0.astype(complex), geo, REFERENCE, t) == pytest.approx(1.0, abs=1e-14)
    perp = np.zeros(16)
    perp[0], perp[15] = 1, -1
    assert fidelity(perp / np.sqrt(2), geo, REFERENCE, t) == pytest.approx(0.0, abs=1e-14)
    assert 0 <= fidelity(C, geo, REFERENCE, t) <= 1


def test_fidelity_at_field_free_endpoint():
    # Bx = 0: the symmetric sector keeps a unique ground state, the even
    # superposition of the two Neel states
    geo = catalog("square")
    neel = np.zeros(16)
    neel[9] = 1.0
    assert fidelity(neel, geo, REFERENCE, REFERENCE.Tff) == pytest.approx(0.5, abs=1e-12)
    neel[10] = 1.0
    assert fidelity(neel / np.sqrt(2), geo, REFERENCE, REFERENCE.Tff) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", ["triangle", "pyramid"])
def test_stationary_without_sweep(name):
    geo = catalog(name)
    still = Schedule(vbar=0.0)
    recs = evolve(geo, still, steps=1000, stride=100)
    probs = np.array([np.abs(r.amplitudes) ** 2 for r in recs])
    assert min(r.fidelity for r in recs) == pytest.approx(1.0, abs=1e-12)
    assert np.abs(probs - probs[0]).max() <= 1e-12
    assert all(r.v == 0.0 and not any(r.weights.w) for r in recs)


def test_step_halving_fourth_order():
    geo = catalog("chain4")
    finals = [evolve(geo, REFERENCE, steps=n)[-1].amplitudes for n in (1000, 2000, 4000)]
    e1 = np.linalg.norm(finals[0] - finals[1])
    e2 = np.linalg.norm(finals[1] - finals[2])
    assert 12 < e1 / e2 < 20


def test_step_size_error():
    with pytest.raises(StepSizeError):
        evolve(catalog("triangle"), REFERENCE, steps=1000, norm_limit=1e-30)


@pytest.mark.parametrize("kw", [{"steps": 999}, {"steps": 1000, "stride": 3}])
def test_evolve_argument_checks(kw):
    with pytest.raises(ValueError):
        evolve(catalog("triangle"), REFERENCE, **kw)


def test_record_layout():
    recs = evolve(catalog("chain3"), REFERENCE, steps=2000, stride=500)
    assert [r.t for r in recs] == pytest.approx([0, 0.025, 0.05, 0.075, 0.1])
    assert recs[-1].R == 10.0 and recs[-1].Bx == 0.0


def test_triangle_reference_run():
    recs = reference_run("triangle")
    assert min(r.fidelity for r in recs) >= 1 - 1e-6
    p1 = [abs(r.amplitudes[0]) ** 2 for r in recs]
    p2 = [abs(r.amplitudes[1]) ** 2 for r in recs]
    assert p1[0] == pytest.approx(1 / 8, abs=1e-14)
    assert p1[-1] < p1[0] and p2[-1] > p2[0]


def test_triangle_undriven_contrast():
    final = reference_run("triangle", driving=False)[-1].fidelity
    # regression value from the bare-H0 run
    assert final == pytest.approx(0.79400, abs=1e-4)
    assert final < 0.9


@pytest.mark.parametrize("name", GEOMETRIES)
def test_class_amplitudes_stay_equal(name):
    geo = catalog(name)
    for rec in reference_run(name):
        probs = np.abs(rec.amplitudes) ** 2
        for cls in geo.component_classes:
            assert np.ptp(probs[np.array(cls) - 1]) <= 1e-8
        assert abs(rec.norm - 1) <= 1e-9


def test_fidelity_projector_fallback(monkeypatch):
    import ffclusters.fastforward as ff
    from ffclusters.groundstate import GroundState

    def closed_gap(geo, J, Bx):
        gs = ground_state(geo, J, Bx)
        return GroundState(gs.energy, gs.components, 0.0)

    geo = catalog("square")
    neel = np.zeros(16)
    neel[9] = 1.0
    # the full space at Bx = 0 has a two-fold lowest level holding both Neel states
    monkeypatch.setattr(ff, "ground_state", closed_gap)
    assert fidelity(neel, geo, REFERENCE, REFERENCE.Tff) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(np.eye(16)[0], geo, REFERENCE, REFERENCE.Tff) == pytest.approx(0.0, abs=1e-12)
