"""Finite-difference helpers and the Gaussian test-function family on N̄."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .grp import nbar_left_jacobian, nbar_mul
from .liealg import RealizedAlgebra

# Central stencils for d^k/dx^k with O(h^2) error, as (offsets, weights).
_STENCILS = {
    0: (np.array([0.0]), np.array([1.0])),
    1: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([-0.5, 1.0, -1.0, 0.5])),
    4: (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]), np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}

# Default base steps by total derivative order, balancing truncation and rounding.
DEFAULT_STEPS = {1: 1e-3, 2: 2.5e-3, 3: 6e-3, 4: 1.6e-2}


def _stencil_estimate(F, x0, alpha, h):
    x0 = np.asarray(x0, dtype=float)
    axes = [(i, a) for i, a in enumerate(alpha) if a]
    total = None
    grids = [list(zip(*_STENCILS[a])) for _, a in axes]
    for combo in itertools.product(*grids):
        x = x0.copy()
        w = 1.0
        for (i, _), (off, wt) in zip(axes, combo):
            x[i] += off * h
            w *= wt
        val = w * np.asarray(F(x))
        total = val if total is None else total + val
    return total / h ** sum(alpha)


def mixed_partial(F, x0, alpha, h: float | None = None):
    """∂^α F(x0) by tensor-product central stencils with one Richardson step."""
    alpha = tuple(int(a) for a in alpha)
    order = sum(alpha)
    if order == 0:
        return np.asarray(F(np.asarray(x0, dtype=float)))
    if max(alpha) > 4:
        raise ValueError("stencils are provided up to order 4 per coordinate")
    if h is None:
        h = DEFAULT_STEPS.get(order, 2e-2)
    d1 = _stencil_estimate(F, x0, alpha, h)
    d2 = _stencil_estimate(F, x0, alpha, h / 2)
    return (4.0 * d2 - d1) / 3.0


def richardson_derivative(f, t0: float = 0.0, h: float = 1e-3):
    """d/dt f(t) at t0 from central differences at h and h/2."""
    return mixed_partial(lambda x: f(x[0]), np.array([t0]), (1,), h)


def left_derivative(alg: RealizedAlgebra, fn, Y, W, h: float = 1e-3):
    """E_W f(y) = d/dt f(y exp tW)|₀, with y and W in (E_i) coordinates.

    Uses ``fn.left_derivative`` when the callable provides it.
    """
    hook = getattr(fn, "left_derivative", None)
    if hook is not None:
        return hook(Y, W)
    Y = np.asarray(Y, dtype=float)
    W = np.asarray(W, dtype=float)
    return richardson_derivative(lambda t: fn(nbar_mul(alg, Y, t * W)), 0.0, h)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """φ(y) = p(Y) exp(-c‖Y‖²) u with Y = log y in (E_i) coordinates.

    ``poly`` maps multi-indices to real coefficients (total degree ≤ 3).
    """

    __test__ = False  # not a pytest class

    alg: RealizedAlgebra
    poly: dict
    c: float
    u: np.ndarray
    _exps: np.ndarray = field(init=False, repr=False)
    _coef: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.alg.dim_nbar
        if self.c <= 0:
            raise ValueError("decay rate c must be positive")
        exps = np.array([tuple(k) for k in self.poly], dtype=int).reshape(-1, n)
        if exps.size and exps.sum(axis=1).max() > 3:
            raise ValueError("polynomial degree is capped at 3")
        object.__setattr__(self, "_exps", exps)
        object.__setattr__(self, "_coef", np.array(list(self.poly.values()), dtype=float))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex))

    def _p(self, Y):
        return float(np.sum(self._coef * np.prod(Y[None, :] ** self._exps, axis=1)))

    def _grad_p(self, Y):
        n = len(Y)
        g = np.zeros(n)
        for i in range(n):
            e = self._exps.copy()
            k = self._exps[:, i].copy()
            mask = k > 0
            e[mask, i] -= 1
            g[i] = float(np.sum((self._coef * k)[mask] * np.prod(Y[None, :] ** e[mask], axis=1)))
        return g

    def __call__(self, Y):
        Y = np.asarray(Y, dtype=float)
        return self._p(Y) * np.exp(-self.c * (Y @ Y)) * self.u

    def gradient(self, Y):
        """Euclidean gradient in log-coordinates, shape (n, dimE)."""
        Y = np.asarray(Y, dtype=float)
        g = (self._grad_p(Y) - 2.0 * self.c * self._p(Y) * Y) * np.exp(-self.c * (Y @ Y))
        return np.outer(g, self.u)

    def left_derivative(self, Y, W):
        J = nbar_left_jacobian(self.alg, Y)
        return (J @ np.asarray(W, dtype=float)) @ self.gradient(Y)


def random_test_function(alg: RealizedAlgebra, dimE: int, rng) -> TestFunction:
    n = alg.dim_nbar
    poly = {(0,) * n: 1.0 + 0.5 * rng.random()}
    for i in range(n):
        e = [0] * n
        e[i] = 1
        poly[tuple(e)] = rng.uniform(-1, 1)
        e2 = list(e)
        e2[i] = 2
        poly[tuple(e2)] = rng.uniform(-0.5, 0.5)
    if n >= 2:
        e = [0] * n
        e[0] = e[1] = 1
        poly[tuple(e)] = rng.uniform(-0.5, 0.5)
    u = rng.standard_normal(dimE) + 1j * rng.standard_normal(dimE)
    return TestFunction(alg, poly, c=rng.uniform(0.2, 0.5), u=u)
