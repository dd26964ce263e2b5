import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reeblift import examples
from reeblift.domain import classify_many
from reeblift.errors import DegreeOverflow, DimensionError
from reeblift.lift import (LiftSpec, _radii, build_lift, fibre_directions, gradient_norms, read_lift, sample_surface,
                           verify_regularity, write_lift)
from reeblift.poly import Polynomial


def V(i, n=4):
    return Polynomial.variable(i, n)


@pytest.fixture(scope="module")
def sphere_lift():
    spec = LiftSpec(examples.unit_disk(), 4)
    return spec, sample_surface(spec, 60 ** 2, 8, seed=1)


@pytest.fixture(scope="module")
def annulus_lift():
    spec = LiftSpec(examples.annulus(1, 2), 4)
    return spec, sample_surface(spec, 40 ** 2, 8, seed=2)


def test_build_lift_examples():
    x1, x2, y1, y2 = (V(i) for i in range(4))
    F = build_lift(LiftSpec(examples.unit_disk(), 4))
    assert F == 1 - x1 ** 2 - x2 ** 2 - y1 ** 2 - y2 ** 2
    F = build_lift(LiftSpec(examples.annulus(1, 2), 4))
    assert F.allclose((4 - x1 ** 2 - x2 ** 2) * (x1 ** 2 + x2 ** 2 - 1) - y1 ** 2 - y2 ** 2)
    F = build_lift(LiftSpec(examples.unit_disk(), 4, exps=(2, 1), coeffs=(3, 1)))
    assert F == 1 - x1 ** 2 - x2 ** 2 - 3 * y1 ** 4 - y2 ** 2


def test_spec_validation(disk):
    with pytest.raises(ValueError):
        LiftSpec(disk, 3)
    assert LiftSpec(disk, 3, allow_k0_eq_k_plus_1=True).kprime == 1
    with pytest.raises(DimensionError):
        LiftSpec(disk, 4, exps=(1,))
    with pytest.raises(ValueError):
        LiftSpec(disk, 4, exps=(0, 1))
    with pytest.raises(ValueError):
        LiftSpec(disk, 4, coeffs=(1.0, -1.0))
    spec = LiftSpec(disk, 5, exps=(1, 2, 3), coeffs=(1, 2, 3))
    assert LiftSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec


def test_degree_overflow(disk):
    with pytest.raises(DegreeOverflow):
        build_lift(LiftSpec(disk, 4, exps=(40, 1)))


def test_fibre_examples(disk, ann):
    res = sample_surface(LiftSpec(disk, 4), 41 ** 2, 8, seed=0)
    at0 = res.points[np.all(np.abs(res.x) < 1e-12, axis=1)]
    assert len(at0) == 8
    np.testing.assert_allclose(np.linalg.norm(at0[:, 2:], axis=1), 1.0, atol=1e-12)
    at1 = res.points[np.all(np.abs(res.x - [1.0, 0.0]) < 1e-12, axis=1)]
    assert len(at1) == 1 and np.all(at1[0, 2:] == 0.0)

    spec = LiftSpec(ann, 4)
    F = build_lift(spec)
    P = (4 - 2.25) * (2.25 - 1)
    r = np.sqrt(2.1875)
    assert P == pytest.approx(2.1875)
    for u in fibre_directions(2, 8, np.random.default_rng(0)):
        assert abs(F([1.5, 0.0, *(r * u)])) < 1e-12


def test_samples_on_surface(sphere_lift, annulus_lift):
    for spec, res in (sphere_lift, annulus_lift):
        assert np.max(np.abs(res.F.evaluate_many(res.points))) < 1e-9
    _, res = sphere_lift
    np.testing.assert_allclose(np.linalg.norm(res.points, axis=1), 1.0, atol=1e-9)


def test_compactness_proxy(annulus_lift):
    spec, res = annulus_lift
    P = np.prod(spec.dom.values(res.base), axis=1)
    rmax = np.max(np.sqrt(np.maximum(P, 0)))
    assert np.all(np.linalg.norm(res.points, axis=1) <= spec.dom.bound + rmax + 1e-9)


def test_samples_not_exterior(annulus_lift):
    spec, res = annulus_lift
    kind, _, _ = classify_many(spec.dom, res.x)
    assert np.all(kind >= 0)


def test_gvalues_are_first_coordinate(annulus_lift):
    _, res = annulus_lift
    assert np.array_equal(res.gvalues, res.points[:, 0])


@pytest.mark.parametrize("n_fiber", [1, 3, 8])
def test_fibre_dichotomy(ann, n_fiber):
    spec = LiftSpec(ann, 4)
    res = sample_surface(spec, 30 ** 2, n_fiber, seed=0)
    counts = np.bincount(res.base_index, minlength=len(res.base))
    P = np.prod(ann.values(res.base), axis=1)
    assert np.all(counts[res.base_kind == 1] == n_fiber)
    assert np.all(counts[res.base_kind == 0] == 1)
    assert np.all(np.abs(P[res.base_kind == 0]) <= 1e-9)
    assert np.all(P[res.base_kind == 1] > 1e-9)
    # interior fibres are distinct points
    for b in np.flatnonzero(res.base_kind == 1)[:50]:
        pts = res.points[res.base_index == b]
        assert len(np.unique(np.round(pts, 14), axis=0)) == n_fiber
    assert res.meta["n_boundary_base"] > 0


def test_generalised_exponents():
    spec = LiftSpec(examples.chain(2), 4, exps=(2, 1), coeffs=(3, 1))
    res = sample_surface(spec, 40 ** 2, 8)
    assert np.max(np.abs(res.F.evaluate_many(res.points))) < 1e-9
    assert verify_regularity(spec, res).passed


def test_higher_codimension():
    spec = LiftSpec(examples.annulus(1, 2), 6, exps=(1, 2, 1, 3), coeffs=(1, 0.5, 2, 1))
    res = sample_surface(spec, 30 ** 2, 5)
    assert res.points.shape[1] == 6
    assert np.max(np.abs(res.F.evaluate_many(res.points))) < 1e-9


def test_kprime_one_limits_directions(disk):
    spec = LiftSpec(disk, 3, allow_k0_eq_k_plus_1=True)
    res = sample_surface(spec, 20 ** 2, 2)
    counts = np.bincount(res.base_index)
    assert set(counts[res.base_kind == 1]) == {2}
    with pytest.raises(ValueError):
        sample_surface(spec, 20 ** 2, 3)


def test_regularity_sphere(sphere_lift):
    spec, res = sphere_lift
    rep = verify_regularity(spec, res)
    assert rep.passed
    assert rep.min_grad_norm == pytest.approx(2.0, abs=1e-9)


def test_regularity_annulus_floor():
    spec = LiftSpec(examples.annulus(1, 2), 4)
    res = sample_surface(spec, 36 ** 2, 8, seed=3)
    assert len(res) >= 10 ** 4
    rep = verify_regularity(spec, res)
    assert rep.passed and rep.min_grad_norm > 0.5


def test_regularity_fails_on_intersecting_circles():
    spec = LiftSpec(examples.intersecting_circles(), 4)
    res = sample_surface(spec, 100 ** 2, 8)
    rep = verify_regularity(spec, res)
    assert not rep.passed
    w = rep.witness
    assert abs(w[0] - 0.5) < 1e-6 and abs(abs(w[1]) - np.sqrt(3) / 2) < 1e-6
    assert np.allclose(w[2:], 0.0, atol=1e-6)


def test_gradient_norms_match_closed_form():
    rng = np.random.default_rng(5)
    Z = rng.normal(size=(100, 4))
    F = build_lift(LiftSpec(examples.unit_disk(), 4))
    np.testing.assert_allclose(gradient_norms(F, Z), 2 * np.linalg.norm(Z, axis=1), rtol=1e-12)


def test_jsonl_round_trip(tmp_path, annulus_lift):
    spec, res = annulus_lift
    path = tmp_path / "lift.jsonl"
    write_lift(path, res)
    lines = path.read_text().splitlines()
    assert json.loads(lines[0])["type"] == "header"
    rec = json.loads(lines[1])
    assert set(rec) == {"x", "y", "g"} and rec["g"] == rec["x"][0]
    back = read_lift(path)
    assert back.spec == spec
    assert len(back) == len(res)
    np.testing.assert_array_equal(np.sort(back.points, axis=0), np.sort(res.points, axis=0))
    counts = np.bincount(back.base_index)
    assert set(counts[back.base_kind == 1]) == {8} and set(counts[back.base_kind == 0]) == {1}


def test_seed_determinism(ann):
    spec = LiftSpec(ann, 4)
    a = sample_surface(spec, 20 ** 2, 4, seed=9)
    b = sample_surface(spec, 20 ** 2, 4, seed=9)
    np.testing.assert_array_equal(a.points, b.points)


@settings(max_examples=100)
@given(st.integers(1, 3), st.integers(1, 3), st.floats(0.2, 5), st.floats(0.2, 5), st.floats(0.01, 3.0))
def test_radial_scale_solves_fibre_equation(m1, m2, c1, c2, P):
    spec = LiftSpec(examples.unit_disk(), 4, exps=(m1, m2), coeffs=(c1, c2))
    U = fibre_directions(2, 6, np.random.default_rng(0))
    R = _radii(spec, np.array([P]), U)[0]
    S = c1 * (R * U[:, 0]) ** (2 * m1) + c2 * (R * U[:, 1]) ** (2 * m2)
    np.testing.assert_allclose(S, P, rtol=1e-12)
