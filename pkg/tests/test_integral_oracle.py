import cmath
import math

import pytest

from bps_rh import integral_oracle as io
from bps_rh.errors import DomainError, ToleranceError
from bps_rh.integral_oracle import QuadratureSpec
from bps_rh.lambda_kernel import lambda_, log_lambda

TWO_PI_I = 2j * math.pi


def test_theta0_unit_point():
    assert io.xhat_theta0(-TWO_PI_I).value == pytest.approx(math.e / math.sqrt(2 * math.pi), abs=1e-9)
    assert io.xhat_theta0(-TWO_PI_I).value.real == pytest.approx(1.0844375, abs=1e-7)


def test_theta0_against_kernel():
    assert abs(io.xhat_theta0(-10 * TWO_PI_I).value - lambda_(0, 10)) < 1e-9


def test_theta0_domain():
    with pytest.raises(DomainError):
        io.xhat_theta0(2j)


def test_theta_to_zero_from_above():
    assert abs(io.xhat(1e-9j, -2j).value - lambda_(0, 2j / TWO_PI_I)) < 1e-8


# both identities are claimed for Im w < 0; across Im w = 0 the integral jumps
@pytest.mark.parametrize("theta,w", [(0.3 + 1j, -2 - 1j), (-0.7 + 4j, 3 - 2j), (1j * math.pi, -5j),
                                     (0.2 + 6j, -1 - 0.5j)])
def test_upper_strip_matches_kernel(theta, w):
    r = io.xhat(theta, w)
    assert abs(cmath.exp(r.log_value - log_lambda(theta / TWO_PI_I, -w / TWO_PI_I)) - 1) < 1e-7


@pytest.mark.parametrize("theta,w", [(0.3 - 1j, -2 - 1j), (-0.7 - 4j, 3 - 2j), (0.1 - 6j, 2 - 0.3j)])
def test_lower_strip_matches_shifted_kernel(theta, w):
    r = io.xhat(theta, w)
    ref = log_lambda(1 + theta / TWO_PI_I, -w / TWO_PI_I)
    assert abs(cmath.exp(r.log_value - ref) - 1) < 1e-7


def test_symmetry():
    for theta, w in ((0.4 + 2j, 1.5 - 2j), (-1 + 5j, -3 + 1j)):
        prod = cmath.exp(io.xhat(theta, w).log_value + io.xhat(-theta, -w).log_value)
        assert abs(prod - 1) < 1e-9


def test_domain_errors():
    with pytest.raises(DomainError):
        io.xhat(1.0, -2j)
    with pytest.raises(DomainError):
        io.xhat(1j, 3.0)
    with pytest.raises(DomainError):
        io.xhat(7j, -1j)


def test_extended_zero_steps():
    theta, w = 0.2 + 2j, -1 - 1j
    assert io.xhat_extended(theta, w).value == io.xhat(theta, w).value


def test_extended_one_step():
    theta, w = 0.2 + 8j, -1 - 1j
    lhs = io.xhat_extended(theta, w).value
    rhs = io.xhat(theta - TWO_PI_I, w).value * (1 - theta / w)
    assert lhs == pytest.approx(rhs, rel=1e-14)


def test_extended_zero_at_theta_equal_w():
    w = 0.5 + 7j
    assert io.xhat_extended(w, w).value == 0


@pytest.mark.parametrize("theta,w", [(1j * math.pi, -5 - 5j), (0.5 + 1j, -10j), (1j * math.pi, -5j),
                                     (0.4 + 9j, -3 - 4j), (-0.2 + 14j, -2j)])
def test_integral_matches_lambda(theta, w):
    assert io.theorem32_residual(theta, w) < 1e-6


def test_integral_identity_domain():
    with pytest.raises(DomainError):
        io.theorem32_residual(-1j, -2j)


def test_upper_base_extension_disagrees_beyond_first_strip():
    # with the upper base strip the recursion is off by one step once Im theta > 2 pi
    theta, w = 1 + 7j, -3 - 4j
    lam = lambda_(theta / TWO_PI_I, -w / TWO_PI_I)
    upper = io.xhat_extended(theta - TWO_PI_I, w, base_strip="upper").value
    lower = io.xhat_extended(theta - TWO_PI_I, w, base_strip="lower").value
    assert abs(lam / lower - 1) < 1e-9
    assert abs(lam / upper - 1) > 1e-2


@pytest.mark.parametrize("w0", [3.0, -3.0, 7.0, -7.0])
def test_jump_across_real_axis(w0):
    assert io.jump_residual_xhat(1j * math.pi / 2, w0) < 1e-6


def test_jump_wrong_factor_fails():
    # swapping sides turns the jump into its inverse
    theta, w0 = 1j * math.pi / 2, 3.0
    up = io.side_limit_log(theta, w0, +1)
    dn = io.side_limit_log(theta, w0, -1)
    s = 1 - cmath.exp(theta - w0)
    assert abs(cmath.exp(dn - up) / s - 1) > 1e-3


def test_jump_domain():
    with pytest.raises(DomainError):
        io.jump_residual_xhat(1j, 0.0)


@pytest.mark.parametrize("theta,w", [(0.3 + 2j, -3 - 2j), (-0.5 + 4j, 2 + 1j), (0.3 - 2j, -3 - 2j)])
def test_gradient(theta, w):
    assert io.gradient_residual(theta, w) < 1e-8


def test_gradient_with_opposite_shift_fails_on_upper_strip():
    theta, w = 0.3 + 2j, -3 - 2j
    wrong = -(theta + 1j * math.pi) / (TWO_PI_I * w)
    assert abs(io.gradient_lhs(theta, w) - wrong) > 0.1


def test_halving_is_self_consistent():
    q = QuadratureSpec()
    a = io.xhat(0.5 + 1j, -4j, q)
    b = io.xhat(0.5 + 1j, -4j, q.halved())
    assert abs(a.value - b.value) < q.abs_tol + a.error


def test_truncated_range_reports_large_error():
    r = io.xhat(0.5 + 1j, -4j, QuadratureSpec(s_max=2.0))
    assert r.error == math.inf or r.error > 1e-3


def test_budget_exhaustion_raises():
    with pytest.raises(ToleranceError):
        io.xhat(0.5 + 1j, -4j, QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, panels=1, max_panels=3))


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(panels=0)
