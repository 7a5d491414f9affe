import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import sl2_elements
from pscontract.errors import NotInBigCell
from pscontract.grp import (
    adjoint,
    bruhat,
    dot_action,
    exp_group,
    expm_ss,
    iwasawa,
    lemma21_derivatives,
    log_nbar,
    nbar_left_jacobian,
    nbar_matrix,
    nbar_mul,
    polar,
    random_group_element,
    random_k,
    random_nbar,
)
from pscontract.functions import richardson_derivative


def test_expm_matches_scipy():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4):
        for scale in (0.1, 1.0, 5.0):
            M = scale * rng.standard_normal((n, n))
            np.testing.assert_allclose(expm_ss(M), scipy.linalg.expm(M), rtol=1e-12, atol=1e-12)


def test_exp_of_nilpotent(sl2):
    _, _, F = sl2_elements(sl2)
    s = 0.7
    np.testing.assert_allclose(exp_group(sl2, s * F), [[1, 0], [s, 1]], atol=1e-15)


def test_adjoint_of_lower_unipotent(sl2):
    # explicit conjugation: [[1,0],[s,1]] E [[1,0],[-s,1]] = [[-s,1],[-s^2,s]]
    H, E, F = sl2_elements(sl2)
    s = 0.4
    got = adjoint(sl2, exp_group(sl2, s * F), E)
    np.testing.assert_allclose(sl2.matrix(got), [[-s, 1], [-s * s, s]], atol=1e-14)
    np.testing.assert_allclose(got, E - s * H - s**2 * F, atol=1e-14)


def test_iwasawa_sl2_oracle(sl2):
    # g = exp(sF): the a-part of the QR factor is diag(sqrt(1+s^2), 1/sqrt(1+s^2))
    _, _, F = sl2_elements(sl2)
    for s in (0.0, 0.3, -2.0):
        f = iwasawa(sl2, exp_group(sl2, s * F))
        H = sl2.coords(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(f.log_atilde, 0.5 * np.log1p(s * s) * H, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_iwasawa_round_trip(n):
    from pscontract.liealg import build_sl

    alg = build_sl(n)
    rng = np.random.default_rng(n)
    for _ in range(100):
        g = random_group_element(alg, rng, 1.0)
        f = iwasawa(alg, g)
        np.testing.assert_allclose(f.ktilde @ f.atilde @ f.ntilde, g, atol=1e-12 * np.linalg.norm(g))
        np.testing.assert_allclose(f.ktilde @ f.ktilde.T, np.eye(n), atol=1e-13)
        assert np.linalg.det(f.ktilde) == pytest.approx(1.0)
        assert np.all(np.diag(f.atilde) > 0)
        np.testing.assert_allclose(np.diag(f.ntilde), 1.0, atol=1e-14)
        np.testing.assert_allclose(np.tril(f.ntilde, -1), 0.0, atol=1e-14)


def test_bruhat_sl2_oracle(sl2):
    a, b, c = 2.0, 0.5, 3.0
    g = np.array([[a, b], [c, (1 + b * c) / a]])
    f = bruhat(sl2, g)
    np.testing.assert_allclose(nbar_matrix(sl2, f.nbar), [[1, 0], [c / a, 1]], atol=1e-14)
    np.testing.assert_allclose(f.a, np.diag([a, 1 / a]), atol=1e-14)
    np.testing.assert_allclose(f.n, [[1, b / a], [0, 1]], atol=1e-14)
    np.testing.assert_allclose(f.m, np.eye(2))


def test_bruhat_negative_pivot_goes_to_m(sl2):
    f = bruhat(sl2, np.array([[-2.0, 0.0], [0.0, -0.5]]))
    np.testing.assert_allclose(f.m, -np.eye(2))
    np.testing.assert_allclose(f.a, np.diag([2.0, 0.5]))


def test_bruhat_rejects_weyl_element(sl2):
    with pytest.raises(NotInBigCell):
        bruhat(sl2, np.array([[0.0, 1.0], [-1.0, 0.0]]))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_bruhat_round_trip(n):
    from pscontract.liealg import build_sl

    alg = build_sl(n)
    rng = np.random.default_rng(10 + n)
    for _ in range(100):
        g = random_group_element(alg, rng, 0.8)
        f = bruhat(alg, g)
        rebuilt = f.nbar_matrix(alg) @ f.m @ f.a @ f.n
        np.testing.assert_allclose(rebuilt, g, atol=1e-11 * np.linalg.norm(g))
        np.testing.assert_allclose(np.triu(f.n, 1) + np.eye(n), f.n, atol=1e-14)


def test_nbar_log_round_trip(sl3):
    rng = np.random.default_rng(2)
    for _ in range(50):
        Y = random_nbar(sl3, rng, 1.0)
        np.testing.assert_allclose(log_nbar(sl3, nbar_matrix(sl3, Y)), Y, atol=1e-12)


def test_nbar_mul_is_matrix_product(sl3):
    rng = np.random.default_rng(3)
    Y1, Y2 = random_nbar(sl3, rng), random_nbar(sl3, rng)
    prod = nbar_matrix(sl3, nbar_mul(sl3, Y1, Y2))
    np.testing.assert_allclose(prod, nbar_matrix(sl3, Y1) @ nbar_matrix(sl3, Y2), atol=1e-13)


def test_left_jacobian_matches_finite_difference(sl3):
    rng = np.random.default_rng(4)
    Y, W = random_nbar(sl3, rng), random_nbar(sl3, rng)
    fd = richardson_derivative(lambda t: nbar_mul(sl3, Y, t * W))
    np.testing.assert_allclose(nbar_left_jacobian(sl3, Y) @ W, fd, atol=1e-8)


def test_polar_decomposition(sl3):
    rng = np.random.default_rng(5)
    h = random_group_element(sl3, rng, 1.0)
    v, k = polar(sl3, h)
    np.testing.assert_allclose(exp_group(sl3, v) @ k, h, atol=1e-12)
    np.testing.assert_allclose(k @ k.T, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(sl3.proj("V_c") @ v, v, atol=1e-12)


def test_dot_action_rotation_sl2(sl2):
    # k_t y_0 = [[cos, -sin], [sin, cos]]: the lower-left Bruhat entry is tan t
    for t in (0.1, 0.5, 1.2):
        k = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        Y = dot_action(sl2, k, np.zeros(1))
        np.testing.assert_allclose(nbar_matrix(sl2, Y)[1, 0], np.tan(t), atol=1e-14)


def test_dot_action_is_an_action(sl3):
    rng = np.random.default_rng(6)
    for _ in range(20):
        k1, k2 = random_k(sl3, rng, 0.4), random_k(sl3, rng, 0.4)
        Y = random_nbar(sl3, rng, 0.3)
        lhs = dot_action(sl3, k1 @ k2, Y)
        rhs = dot_action(sl3, k1, dot_action(sl3, k2, Y))
        np.testing.assert_allclose(lhs, rhs, atol=1e-11)


def test_dot_action_identity(sl3):
    Y = np.array([0.1, -0.2, 0.3])
    np.testing.assert_allclose(dot_action(sl3, np.eye(3), Y), Y, atol=1e-15)


def test_factor_curve_derivatives_match_fd(sl3):
    rng = np.random.default_rng(7)
    x = sl3.random_element(rng, 0.5)
    Y = random_nbar(sl3, rng, 0.5)
    y = nbar_matrix(sl3, Y)
    d = lemma21_derivatives(sl3, x, Y)
    curve = lambda t: bruhat(sl3, exp_group(sl3, t * x) @ y)
    np.testing.assert_allclose(richardson_derivative(lambda t: curve(t).log_a), d["da"], atol=1e-8)
    np.testing.assert_allclose(richardson_derivative(lambda t: curve(t).nbar), d["dnbar_log"], atol=1e-8)
    at = lambda t: iwasawa(sl3, exp_group(sl3, t * x) @ iwasawa(sl3, y).ktilde).log_atilde
    np.testing.assert_allclose(richardson_derivative(at), d["datilde"], atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_exp_group_has_unit_determinant(a, b, c):
    from pscontract.liealg import build_sl

    alg = build_sl(2)
    assert np.linalg.det(exp_group(alg, np.array([a, b, c]))) == pytest.approx(1.0, rel=1e-12)
