import numpy as np
import pytest

from pscontract.functions import random_test_function
from pscontract.grp import random_k
from pscontract.orbits import (
    ProductPoint,
    check_adapted,
    check_symplecto,
    coadjoint_action_residual,
    coadjoint_g0,
    pairing_residuals,
    psi,
    psi0,
    psi0_invert,
    psi1,
    random_point,
    unit_symbol_residual,
    z_prime,
)


def probes(params, count=3, seed=0):
    rng = np.random.default_rng(seed)
    alg = params.alg
    return [(random_test_function(alg, params.fiber.dimE, rng), 0.4 * rng.standard_normal(alg.dim_nbar)) for _ in range(count)]


@pytest.mark.parametrize("name", ["p2", "p3"])
def test_base_point_maps_to_xi0(name, request):
    params = request.getfixturevalue(name)
    n = params.alg.dim_nbar
    base = ProductPoint(np.zeros(n), np.zeros(n), params.fiber.xi2)
    np.testing.assert_allclose(psi(params, base), params.xi0, atol=1e-14)
    np.testing.assert_allclose(psi0(params, base)[0], params.xi1, atol=1e-14)


@pytest.mark.parametrize("name", ["p2", "p3"])
def test_two_orbit_parametrisations_agree_after_shift(name, request):
    params = request.getfixturevalue(name)
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = random_point(params, rng)
        q = ProductPoint(p.Y, z_prime(params, p.Y, p.Z), p.phi)
        np.testing.assert_allclose(psi(params, p), psi1(params, q), atol=1e-12)


def test_opposite_shift_sign_fails(p2):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(10):
        p = random_point(params := p2, rng)
        q = ProductPoint(p.Y, z_prime(params, p.Y, p.Z, sign=1.0), p.phi)
        worst = max(worst, np.linalg.norm(psi(params, p) - psi1(params, q)))
    assert worst > 0.1


@pytest.mark.parametrize("name", ["p2", "p3"])
def test_linear_symbols_are_pairings(name, request):
    r = pairing_residuals(request.getfixturevalue(name), np.random.default_rng(3), count=50)
    assert r["g"] < 1e-12 and r["g0"] < 1e-12


@pytest.mark.parametrize("name", ["p2", "p3"])
@pytest.mark.parametrize("which", ["G", "G0"])
def test_linear_symbols_bracket_like_the_algebra(name, which, request):
    params = request.getfixturevalue(name)
    rng = np.random.default_rng(4)
    pts = [random_point(params, rng) for _ in range(10)]
    assert check_symplecto(params, which, pts)["residual"] < 1e-10


def test_symplecto_rejects_unknown_group(p2):
    with pytest.raises(ValueError):
        check_symplecto(p2, "H", [])


@pytest.mark.parametrize("name", ["p2", "p3"])
@pytest.mark.parametrize("which", ["G", "G0"])
def test_quantized_linear_symbols_are_generators(name, which, request):
    params = request.getfixturevalue(name)
    for route in ("auto", "jet"):
        assert check_adapted(params, which, probes(params), route)["residual"] < 1e-6


def test_unit_symbol(p3):
    assert unit_symbol_residual(p3, probes(p3)) < 1e-14


def test_g0_coadjoint_action_law(sl3):
    assert coadjoint_action_residual(sl3, np.random.default_rng(5), count=20) < 1e-12


@pytest.mark.parametrize("name", ["p2", "p3"])
def test_psi0_inversion(name, request):
    params = request.getfixturevalue(name)
    alg = params.alg
    rng = np.random.default_rng(6)
    for _ in range(10):
        v, k = alg.random_in("V", rng), random_k(alg, rng, 0.6)
        p = psi0_invert(params, v, k)
        w, U = psi0(params, p)
        tw, tU = coadjoint_g0(alg, (v, k), (params.xi1, params.xi2))
        np.testing.assert_allclose(w, tw, atol=1e-10)
        np.testing.assert_allclose(U, tU, atol=1e-10)
