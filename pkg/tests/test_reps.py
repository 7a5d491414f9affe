import numpy as np
import pytest

from pscontract.errors import NonRegular
from pscontract.fiber import SpinFiber, trivial_character
from pscontract.functions import random_test_function, richardson_derivative
from pscontract.grp import dot_action, exp_group, nbar_matrix, random_group_element, random_k
from pscontract.reps import (
    PrincipalSeriesParams,
    dpi0_apply,
    dpi_apply,
    equivariance_residuals,
    frame,
    g0_inv,
    g0_mul,
    pi0_apply,
    pi0_op,
    pi_apply,
    pi_op,
    unitarity_witness,
)


def test_params_validation(sl2, sl3):
    with pytest.raises(NonRegular, match="regularity violated"):
        PrincipalSeriesParams(sl2, np.zeros(3), trivial_character())
    with pytest.raises(NonRegular):
        PrincipalSeriesParams(sl3, sl3.coords(np.diag([1.0, 1.0, -2.0])), trivial_character())
    with pytest.raises(ValueError):
        PrincipalSeriesParams(sl2, np.array([0.0, 1.0, 0.0]), trivial_character())
    with pytest.raises(ValueError):
        PrincipalSeriesParams(sl2, sl2.coords(np.diag([1.0, -1.0])), SpinFiber(0.5))


def test_with_scale(p2):
    np.testing.assert_allclose(p2.with_scale(0.25).xi1, 4 * p2.xi1)
    for r in (0.0, 1.5):
        with pytest.raises(ValueError):
            p2.with_scale(r)


def test_identity_acts_trivially(p3):
    rng = np.random.default_rng(0)
    fn = random_test_function(p3.alg, 1, rng)
    Y = rng.standard_normal(3) * 0.5
    np.testing.assert_allclose(pi_apply(p3, np.eye(3), fn, Y), fn(Y), atol=1e-14)
    np.testing.assert_allclose(pi0_apply(p3, np.zeros(8), np.eye(3), fn, Y), fn(Y), atol=1e-14)


@pytest.mark.parametrize("name", ["p2", "p3"])
def test_group_homomorphism(name, request):
    params = request.getfixturevalue(name)
    alg = params.alg
    rng = np.random.default_rng(1)
    for _ in range(5):
        g1, g2 = random_group_element(alg, rng, 0.3), random_group_element(alg, rng, 0.3)
        fn = random_test_function(alg, 1, rng)
        Y = 0.4 * rng.standard_normal(alg.dim_nbar)
        composed = pi_op(params, g1)(pi_op(params, g2)(fn))
        np.testing.assert_allclose(pi_apply(params, g1 @ g2, fn, Y), composed(Y), atol=1e-10)


@pytest.mark.parametrize("name", ["p2", "p3"])
def test_g0_homomorphism(name, request):
    params = request.getfixturevalue(name)
    alg = params.alg
    rng = np.random.default_rng(2)
    for _ in range(5):
        a = (alg.random_in("V", rng), random_k(alg, rng))
        b = (alg.random_in("V", rng), random_k(alg, rng))
        fn = random_test_function(alg, 1, rng)
        Y = 0.4 * rng.standard_normal(alg.dim_nbar)
        v, k = g0_mul(alg, a, b)
        composed = pi0_op(params, *a)(pi0_op(params, *b)(fn))
        np.testing.assert_allclose(pi0_apply(params, v, k, fn, Y), composed(Y), atol=1e-10)


def test_g0_inverse(sl3):
    rng = np.random.default_rng(3)
    a = (sl3.random_in("V", rng), random_k(sl3, rng))
    v, k = g0_mul(sl3, a, g0_inv(sl3, a))
    np.testing.assert_allclose(v, 0, atol=1e-13)
    np.testing.assert_allclose(k, np.eye(3), atol=1e-13)


def test_pure_translation_is_a_phase(p3):
    alg = p3.alg
    rng = np.random.default_rng(4)
    v = alg.random_in("V", rng)
    fn = random_test_function(alg, 1, rng)
    Y = 0.4 * rng.standard_normal(3)
    phase = np.exp(1j * alg.beta(frame(alg, Y).Ad_k @ p3.xi1, v))
    np.testing.assert_allclose(pi0_apply(p3, v, np.eye(3), fn, Y), phase * fn(Y), atol=1e-13)


def test_rotation_sl2_explicit(p2):
    # g = k_{-t}: g^{-1} y_0 = k_t has Bruhat factors with lower entry tan t and a = diag(cos t, 1/cos t)
    alg = p2.alg
    fn = random_test_function(alg, 1, np.random.default_rng(5))
    for t in (0.2, 0.9):
        k = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        Y = dot_action(alg, k, np.zeros(1))
        assert nbar_matrix(alg, Y)[1, 0] == pytest.approx(np.tan(t))
        got = pi_apply(p2, k.T, fn, np.zeros(1))
        assert abs(got[0]) == pytest.approx(abs(fn(Y)[0]) / np.cos(t), rel=1e-12)


@pytest.mark.parametrize("name", ["p2", "p3"])
def test_derived_action_matches_fd(name, request):
    params = request.getfixturevalue(name)
    alg = params.alg
    rng = np.random.default_rng(6)
    for _ in range(3):
        x = alg.random_element(rng, 0.5)
        fn = random_test_function(alg, 1, rng)
        Y = 0.4 * rng.standard_normal(alg.dim_nbar)
        fd = richardson_derivative(lambda t: pi_apply(params, exp_group(alg, t * x), fn, Y), h=1e-4)
        np.testing.assert_allclose(dpi_apply(params, x, fn, Y), fd, atol=1e-7)


def test_g0_derived_action_matches_fd(p3):
    alg = p3.alg
    rng = np.random.default_rng(7)
    v, U = alg.random_in("V", rng), alg.random_in("k", rng)
    fn = random_test_function(alg, 1, rng)
    Y = 0.4 * rng.standard_normal(3)
    fd_v = richardson_derivative(lambda t: pi0_apply(p3, t * v, np.eye(3), fn, Y), h=1e-4)
    fd_U = richardson_derivative(lambda t: pi0_apply(p3, np.zeros(8), exp_group(alg, t * U), fn, Y), h=1e-4)
    np.testing.assert_allclose(dpi0_apply(p3, v, U, fn, Y), fd_v + fd_U, atol=1e-7)


def test_equivariance_of_factors(sl3):
    rng = np.random.default_rng(8)
    for _ in range(20):
        r = equivariance_residuals(sl3, random_k(sl3, rng, 0.5), 0.4 * rng.standard_normal(3))
        assert r["m"] < 1e-10 and r["atilde"] < 1e-10


def test_norm_preserved_on_sl2(p2):
    fn = random_test_function(p2.alg, 1, np.random.default_rng(9))
    g = random_group_element(p2.alg, np.random.default_rng(10), 0.3)
    coarse = unitarity_witness(p2, g, fn, nodes=40, scale=2.0)
    fine = unitarity_witness(p2, g, fn, nodes=80, scale=2.0)
    assert fine < 1e-8 and fine < coarse
