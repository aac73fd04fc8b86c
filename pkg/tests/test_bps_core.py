import cmath
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from bps_rh import bps_core as bc
from bps_rh.bps_core import BpsStructure, Ray, TorusPoint
from bps_rh.errors import ActiveRayError, ParseError


def a1(z=1j):
    return BpsStructure(1, [[0]], [z], [((1,), 1), ((-1,), 1)])


def coupled(z2=0.5 + 1j):
    return BpsStructure(2, [[0, 1], [-1, 0]], [1 + 0j, z2],
                        [((1, 0), 1), ((-1, 0), 1), ((0, 1), 1), ((0, -1), 1)])


def test_doubled_a1_validates():
    d = bc.double(a1())
    rep = bc.validate(d)
    assert rep.ok, rep.messages
    assert d.rank == 2
    # <alpha, alpha^dual> = 1
    assert d.pair((1, 0), (0, 1)) == 1
    assert d.pair((0, 1), (-1, 0)) == 1


def test_asymmetric_spectrum_fails():
    s = BpsStructure(1, [[0]], [1j], [((1,), 1)])
    rep = bc.validate(s)
    assert not rep.checks["symmetric"]
    assert not rep.ok


def test_zero_central_charge_fails_support():
    s = BpsStructure(2, [[0, 0], [0, 0]], [1, 1], [((1, -1), 1), ((-1, 1), 1)])
    assert not bc.validate(s).checks["support"]


def test_non_skew_pairing_fails():
    s = BpsStructure(2, [[0, 1], [1, 0]], [1, 1j], [])
    assert not bc.validate(s).checks["skew"]


def test_classify():
    assert bc.classify(bc.double(a1())).uncoupled
    f = bc.classify(coupled())
    assert not f.uncoupled and f.generic
    f = bc.classify(coupled(2 + 0j))
    assert not f.generic


def test_active_rays_a1():
    rays = bc.active_rays(a1(1j))
    assert [r.angle for r in rays] == pytest.approx([math.pi / 2, 3 * math.pi / 2])
    assert bc.active_rays(BpsStructure(1, [[0]], [1j], [])) == []


def test_active_rays_merge_equal_phase():
    s = BpsStructure(2, [[0, 0], [0, 0]], [1 + 1j, 2 + 2j],
                     [((1, 0), 1), ((-1, 0), 1), ((0, 1), 3), ((0, -1), 3)])
    assert len(bc.active_rays(s)) == 2


def test_gamma_plus():
    assert bc.gamma_plus(a1(1j)) == [(1,)]
    assert bc.gamma_plus(a1(-1 + 0j)) == [(1,)]
    assert bc.gamma_plus(BpsStructure(1, [[0]], [1j], [])) == []


def test_gamma_r_omega():
    s = a1(1j)
    assert bc.gamma_r_omega(s, Ray(math.pi / 4)) == [(-1,)]
    assert bc.gamma_r_omega(s, Ray(3 * math.pi / 4)) == [(1,)]
    assert bc.gamma_r_omega(s, Ray(math.pi / 4).opposite()) == [(1,)]
    with pytest.raises(ActiveRayError):
        bc.gamma_r_omega(s, Ray(math.pi / 2))


def test_double_empty_spectrum():
    s = BpsStructure(2, [[0, 0], [0, 0]], [1, 1j], [])
    d = bc.double(s)
    assert d.rank == 4 and d.spectrum == ()
    assert d.central_charge[2:] == (0j, 0j)


def test_double_pairing_is_nondegenerate_and_skew():
    d = bc.double(coupled())
    assert bc.validate(d).checks["skew"]
    # determinant of the doubled form is 1 for any base pairing
    import numpy as np
    assert round(abs(np.linalg.det(np.array(d.pairing, dtype=float)))) == 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=2))
def test_null_lift_pairs_trivially_with_active(g):
    for base in (BpsStructure(2, [[0, 0], [0, 0]], [1, 1j], [((1, 0), 1), ((-1, 0), 1)]),
                 BpsStructure(2, [[0, 1], [-1, 0]], [1, 1j], [((1, 0), 1), ((-1, 0), 1)])):
        d = bc.double(base)
        n = bc.null_lift(base, g)
        assert all(d.pair(n, a) == 0 for a in d.active_classes())


def test_literal_null_orientation_needs_trivial_pairing():
    base = BpsStructure(2, [[0, 1], [-1, 0]], [1, 1j], [((1, 0), 1), ((-1, 0), 1)])
    d = bc.double(base)
    n = bc.null_lift(base, (0, 1), literal=True)
    assert [d.pair(n, a) for a in d.active_classes()] == [-2, 2]
    flat = BpsStructure(2, [[0, 0], [0, 0]], [1, 1j], [((1, 0), 1), ((-1, 0), 1)])
    assert bc.null_lift(flat, (3, -2), literal=True) == bc.null_lift(flat, (3, -2))


def test_torus_eval_and_theta():
    s = coupled()
    xi = TorusPoint((0.3 + 1j, -0.2 + 2j))
    assert bc.torus_eval(s, xi, (0, 0)) == 1
    assert bc.theta_of(s, xi, (0, 0)) == 0
    assert bc.torus_eval(s, xi, (1, 0)) == pytest.approx(cmath.exp(0.3 + 1j))
    assert bc.theta_of(s, xi, (2, 0)) == pytest.approx(2 * (0.3 + 1j))
    assert bc.theta_of(s, xi, (1, 1)) == pytest.approx(0.1 + 3j + 1j * math.pi)
    assert bc.torus_eval(s, xi, (1, 1)) == pytest.approx(-cmath.exp(0.1 + 3j))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3),
       st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_twisted_homomorphism(a, b):
    s = BpsStructure(3, [[0, 1, -2], [-1, 0, 3], [2, -3, 0]], [1, 1j, -1 + 1j], [])
    xi = TorusPoint((0.1 + 0.5j, -0.3 + 2.5j, 0.2 + 4j))
    ab = tuple(x + y for x, y in zip(a, b))
    lhs = bc.torus_eval(s, xi, ab)
    rhs = (-1) ** s.pair(a, b) * bc.torus_eval(s, xi, a) * bc.torus_eval(s, xi, b)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_theta_hat_range():
    s = a1()
    xi = TorusPoint((0.2 + 6.0j,))
    th = bc.theta_hat(s, xi, (-1,))
    assert 0 <= th.imag < 2 * math.pi
    assert cmath.exp(th) == pytest.approx(bc.torus_eval(s, xi, (-1,)))


def test_torus_point_normalises():
    pt, moved = TorusPoint.from_thetas([1 + 7j])
    assert moved and 0 <= pt.thetas[0].imag < 2 * math.pi
    with pytest.warns(UserWarning):
        TorusPoint.from_dict({"theta": [[0.0, -1.0]]})


def test_ray_helpers():
    r = Ray(-0.5)
    assert 0 <= r.angle < 2 * math.pi
    assert r.opposite().opposite().same_as(r)
    assert Ray.of(1j).same_as(Ray(math.pi / 2))
    assert Ray(0.0).in_half_plane(1 + 5j)
    assert not Ray(0.0).in_half_plane(-1 + 5j)


def test_structure_round_trip():
    s = bc.double(coupled())
    d = json.loads(json.dumps(s.to_dict()))
    s2 = BpsStructure.from_dict(d)
    assert s2 == s
    assert s2.fingerprint() == s.fingerprint()


@pytest.mark.parametrize("bad", [{"rank": 1}, {"rank": 2, "pairing": [[0]], "central_charge": [[1, 0]],
                                               "spectrum": []},
                                 {"rank": 1, "pairing": [[0]], "central_charge": [[1, 0]],
                                  "spectrum": [{"gamma": [1, 2], "omega": 1}]}])
def test_from_dict_rejects(bad):
    with pytest.raises(ParseError):
        BpsStructure.from_dict(bad)
