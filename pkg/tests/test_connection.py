import cmath
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from bps_rh import connection as cf
from bps_rh import rh_solver as rh
from bps_rh.bps_core import BpsStructure, Ray
from bps_rh.errors import BranchCutError, CriticalPointError, DomainError
from bps_rh.special_functions import dilog

TWO_PI_I = 2j * math.pi


def a1_base(z=1 + 0.8j):
    return BpsStructure(1, [[0]], [z], [((1,), 1), ((-1,), 1)])


def rank2_base():
    return BpsStructure(2, [[0, 0], [0, 0]], [1 + 0.3j, -0.4 + 1j],
                        [((1, 0), 1), ((-1, 0), 1), ((0, 1), 2), ((0, -1), 2)])


def rank2_context():
    return cf.DoubledContext.build(rank2_base(), [0.4 + 1.1j, -0.3 + 4.2j], [0.1j, 0.5j])


def test_context_checks():
    with pytest.raises(DomainError):
        cf.DoubledContext.build(BpsStructure(2, [[0, 1], [-1, 0]], [1, 1j], []), [1j, 1j])
    c = rank2_context()
    assert c.m == 2 and len(c.xi.thetas) == 4
    assert c.lift((1, -1)) == (1, -1, 0, 0)


def test_empty_spectrum():
    c = cf.DoubledContext.build(BpsStructure(1, [[0]], [1j], []), [0.3 + 1j])
    assert c.base.active_classes() == []
    assert cf.f_omega(c) == 0
    assert cf.f_omega_closed(c) == 0
    assert cf.hamiltonian_field(c).d_theta_dual == (0j,)
    r = Ray(0.5)
    assert cf.flatness_residual(c, r, 0, 0.7 + 0.2j) == 0


def test_f_omega_at_minus_one():
    c = cf.DoubledContext.build(a1_base(), [1j * math.pi])
    assert cf.f_omega(c) == pytest.approx(2 * dilog(-1) / TWO_PI_I, abs=1e-15)
    assert cf.f_omega(c) == pytest.approx((-math.pi ** 2 / 6) / TWO_PI_I, abs=1e-14)


def test_f_omega_on_cut_needs_side():
    # xi(alpha) = e^{0.5} > 1 sits on the dilogarithm cut
    c = cf.DoubledContext.build(a1_base(), [0.5 + 0j])
    with pytest.raises(BranchCutError):
        cf.f_omega(c)
    jump = cf.f_omega(c, side=+1) - cf.f_omega(c, side=-1)
    assert abs(jump) > 0.1


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 2 * math.pi - 0.05), st.floats(-3, 3), st.floats(0.05, 2 * math.pi - 0.05))
def test_closed_form_differs_by_constant(a, b, c_, d):
    c = cf.DoubledContext.build(rank2_base(), [complex(a, b), complex(c_, d)])
    diff = cf.f_omega(c) - cf.f_omega_closed(c)
    assert abs(diff - cf.closed_form_offset(c)) < 1e-10


def test_closed_form_gradient_agreement():
    rng = random.Random(4)
    for _ in range(50):
        th = [complex(rng.uniform(-2, 2), rng.uniform(0.1, 6.1)) for _ in range(2)]
        c = cf.DoubledContext.build(rank2_base(), th)
        for k in range(2):
            g1 = cf.fd_partial(c, cf.f_omega, k)
            g2 = cf.fd_partial(c, cf.f_omega_closed, k)
            assert abs(g1 - g2) < 1e-8
            assert abs(g1 - cf.grad_f_omega(c)[k]) < 1e-8


def test_no_dependence_on_dual_coordinates():
    c = rank2_context()
    for k in (2, 3):
        assert abs(cf.fd_partial(c, cf.f_omega, k)) < 1e-12


def test_hamiltonian_field_a1():
    theta = 0.4 + 2.0j
    c = cf.DoubledContext.build(a1_base(), [theta])
    ham = cf.hamiltonian_field(c)
    assert ham.d_theta == (0j,)
    # dF/dtheta = -(theta - pi i)/(2 pi i) for theta with Im in (0, 2 pi)
    assert ham.d_theta_dual[0] == pytest.approx(-(theta - 1j * math.pi) / TWO_PI_I, abs=1e-12)
    assert cf.central_charge_field(c).d_theta == c.base.central_charge


@pytest.mark.parametrize("which", ["minus", "plus"])
def test_gradx_example(which):
    z, theta, t = 1j, 1j * math.pi / 2, cmath.exp(1j * math.pi / 4)
    assert cf.gradx_residual_a1(z, theta, t, 1e-5, which) < 1e-5
    # the opposite sign on the right-hand side is off by |(theta - pi i)/pi i| = 0.5
    assert cf.gradx_residual_a1(z, theta, t, 1e-5, which, rhs_sign=-1) == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("which", ["minus", "plus"])
def test_gradx_second_order(which):
    z, theta, t = 1j, 1j * math.pi / 2, cmath.exp(1j * math.pi / 4)
    ratio = cf.gradx_residual_a1(z, theta, t, 1e-2, which) / cf.gradx_residual_a1(z, theta, t, 5e-3, which)
    assert 3 <= ratio <= 5


def test_gradx_near_critical_point():
    z, theta = 1 + 0.8j, 0.6 + 1.9j
    p = rh.a1_critical_points(z, theta, "minus", 2)[1].location
    with pytest.raises(CriticalPointError):
        cf.gradx_lhs_a1(z, theta, p, 1e-12, "minus")


def test_flatness_a1_reduces_to_gradx():
    z, theta = 1 + 0.8j, 0.6 + 1.9j
    c = cf.DoubledContext.build(a1_base(z), [theta])
    r = Ray.of(z).rotated(0.4)  # y_minus side
    t = 0.9 * cmath.exp(1j * (r.angle + 0.3))
    assert cf.flow_log_y(c, r, 0, t) == pytest.approx(cf.gradx_lhs_a1(z, theta, t), abs=1e-8)
    # D ln Y = -dF/dtheta
    assert cf.flatness_residual(c, r, 0, t) < 1e-8


def test_flatness_rank2():
    c = rank2_context()
    rng = random.Random(9)
    for _ in range(10):
        ang = rng.uniform(0, 2 * math.pi)
        r = Ray(ang)
        t = cmath.rect(rng.uniform(0.3, 2.0), ang + rng.uniform(-1.2, 1.2))
        for j in (0, 1):
            assert cf.flatness_residual(c, r, j, t) < 1e-5


def test_stated_sign_is_not_flat():
    c = rank2_context()
    r, t = Ray(1.0), 0.8 + 0.9j
    for j in (0, 1):
        assert cf.flatness_residual(c, r, j, t, hamiltonian_sign=cf.STATED_SIGN) > 0.1


def test_flow_matches_gamma_r_sum_on_every_ray():
    c = rank2_context()
    for ang in (0.3, 1.0, 2.0, 3.0, 4.0, 5.0):
        r = Ray(ang)
        t = 0.8 * r.direction
        for j in (0, 1):
            assert abs(cf.flow_log_y(c, r, j, t) - cf.gamma_r_sum(c, r, j)) < 1e-8


def test_printed_coefficient_fails_on_some_ray():
    c = rank2_context()
    worst = 0.0
    for ang in (0.3, 1.0, 2.0, 3.0, 4.0, 5.0):
        r = Ray(ang)
        for j in (0, 1):
            worst = max(worst, abs(cf.flow_log_y(c, r, j, 0.8 * r.direction) - cf.gamma_r_sum(c, r, j, printed=True)))
    assert worst > 0.1


def test_flow_index_range():
    with pytest.raises(DomainError):
        cf.flow_log_y(rank2_context(), Ray(1.0), 2, 1j)
