"""Principal series π of G, the motion-group representation π₀ of G₀ = V ⋊ K,
and their derived representations, applied pointwise to E-valued functions
on N̄ (callables of log-coordinates)."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import NonRegular
from .functions import left_derivative
from .grp import adjoint, adjoint_matrix, bruhat, exp_group, iwasawa, nbar_matrix
from .liealg import RealizedAlgebra


@dataclass(frozen=True, eq=False)
class PrincipalSeriesParams:
    """Data (ξ₁, σ) with ν = β(ξ₁, ·); ξ₂ is the fibre's base point."""

    alg: RealizedAlgebra
    xi1: np.ndarray  # g-coordinates of a regular element of a
    fiber: object

    def __post_init__(self):
        xi1 = np.asarray(self.xi1, dtype=float)
        object.__setattr__(self, "xi1", xi1)
        resid = np.linalg.norm(xi1 - self.alg.proj("a") @ xi1)
        if resid > 1e-10:
            raise ValueError(f"xi1 must lie in a (residual {resid:.3g})")
        if not self.alg.is_regular(xi1):
            raise NonRegular("regularity violated: some restricted root vanishes on xi1")
        if self.fiber.dim_m != self.alg.dim_m:
            raise ValueError(
                f"fibre acts on an algebra m of dimension {self.fiber.dim_m}, but {self.alg.name} has dim m = {self.alg.dim_m}"
            )

    @property
    def xi2(self) -> np.ndarray:
        """ξ₂ as g-coordinates."""
        return self.alg.from_m(self.fiber.xi2)

    @property
    def xi0(self) -> np.ndarray:
        return self.xi1 + self.xi2

    def nu(self, h) -> float:
        return self.alg.beta(self.xi1, np.asarray(h, dtype=float))

    def with_scale(self, r: float) -> "PrincipalSeriesParams":
        """Parameters for ξ_r = ξ₁/r + ξ₂."""
        if not 0 < r <= 1:
            raise ValueError(f"r must lie in (0, 1], got {r}")
        return replace(self, xi1=self.xi1 / r)


# ---------------------------------------------------------------------------
# per-point frame: y, y⁻¹, Ad(y⁻¹), k̃(y), Ad(k̃(y))


@dataclass(frozen=True)
class Frame:
    y: np.ndarray
    yinv: np.ndarray
    Ad_yinv: np.ndarray
    Ad_y: np.ndarray
    ktilde: np.ndarray
    Ad_k: np.ndarray
    Ad_kinv: np.ndarray
    log_atilde: np.ndarray


@lru_cache(maxsize=4096)
def _frame_cached(alg: RealizedAlgebra, key: bytes) -> Frame:
    Y = np.frombuffer(key, dtype=float)
    y = nbar_matrix(alg, Y)
    yinv = nbar_matrix(alg, -Y)
    iw = iwasawa(alg, y)
    A = adjoint_matrix(alg, y)
    Ak = adjoint_matrix(alg, iw.ktilde)
    return Frame(y, yinv, adjoint_matrix(alg, yinv), A, iw.ktilde, Ak, np.linalg.inv(Ak), iw.log_atilde)


def frame(alg: RealizedAlgebra, Y) -> Frame:
    return _frame_cached(alg, np.ascontiguousarray(Y, dtype=float).tobytes())


# ---------------------------------------------------------------------------
# G₀ = V ⋊ K


def g0_mul(alg: RealizedAlgebra, a, b):
    """(v, k)(v′, k′) = (v + Ad(k)v′, kk′)."""
    v, k = a
    v2, k2 = b
    return v + adjoint(alg, k, v2), k @ k2


def g0_inv(alg: RealizedAlgebra, a):
    v, k = a
    return -adjoint(alg, k.T, v), k.T


# ---------------------------------------------------------------------------
# group operators


def pi_apply(params: PrincipalSeriesParams, g, fn, Y) -> np.ndarray:
    """(π(g)φ)(y) in the noncompact picture."""
    alg = params.alg
    Y = np.asarray(Y, dtype=float)
    fr = frame(alg, Y)
    h = np.linalg.solve(g, fr.y)
    b = bruhat(alg, h)
    at = iwasawa(alg, h).log_atilde
    phase = np.exp(1j * params.nu(fr.log_atilde - at))
    dens = np.exp(-float(alg.rho_functional() @ b.log_a))
    S = params.fiber.sigma(b.m)
    return phase * dens * np.linalg.solve(S, fn(b.nbar))


def pi0_apply(params: PrincipalSeriesParams, v, k, fn, Y) -> np.ndarray:
    """(π₀(v, k)φ)(y)."""
    alg = params.alg
    Y = np.asarray(Y, dtype=float)
    fr = frame(alg, Y)
    b = bruhat(alg, k.T @ fr.y)
    w = fr.Ad_k @ params.xi1
    expo = -float(alg.rho_functional() @ b.log_a) + 1j * alg.beta(w, np.asarray(v, dtype=float))
    S = params.fiber.sigma(b.m)
    return np.exp(expo) * np.linalg.solve(S, fn(b.nbar))


class Operator:
    """A function on N̄ obtained by applying an operator to ``fn``."""

    def __init__(self, apply, fn):
        self._apply, self.fn = apply, fn

    def __call__(self, Y):
        return self._apply(self.fn, Y)


def pi_op(params, g):
    return lambda fn: Operator(lambda f, Y: pi_apply(params, g, f, Y), fn)


def pi0_op(params, v, k):
    return lambda fn: Operator(lambda f, Y: pi0_apply(params, v, k, f, Y), fn)


# ---------------------------------------------------------------------------
# derived representations


def _common_terms(params: PrincipalSeriesParams, W, fn, Y) -> np.ndarray:
    """ρ(p_a W)φ + dσ(p_m W)φ - E_{p_n̄ W} φ at y, with W = Ad(y⁻¹)X."""
    alg = params.alg
    val = fn(Y)
    out = float(alg.rho_functional() @ W) * val
    if alg.dim_m:
        out = out + params.fiber.dsigma(alg.m_coeffs(W)) @ val
    return out - left_derivative(alg, fn, Y, alg.to_nbar(W)), val


def dpi_apply(params: PrincipalSeriesParams, x, fn, Y) -> np.ndarray:
    alg = params.alg
    x = np.asarray(x, dtype=float)
    fr = frame(alg, Y)
    W = fr.Ad_yinv @ x
    rest, val = _common_terms(params, W, fn, Y)
    # ν(p̃_a(Ad(k̃⁻¹)X)) = β(ξ₁, Ad(k̃⁻¹)X) = β(Ad(k̃)ξ₁, X)
    return 1j * alg.beta(fr.Ad_k @ params.xi1, x) * val + rest


def dpi0_apply(params: PrincipalSeriesParams, v, U, fn, Y) -> np.ndarray:
    alg = params.alg
    fr = frame(alg, Y)
    W = fr.Ad_yinv @ np.asarray(U, dtype=float)
    rest, val = _common_terms(params, W, fn, Y)
    return 1j * alg.beta(fr.Ad_k @ params.xi1, np.asarray(v, dtype=float)) * val + rest


def dpi_op(params, x):
    return lambda fn: Operator(lambda f, Y: dpi_apply(params, x, f, Y), fn)


def dpi0_op(params, v, U):
    return lambda fn: Operator(lambda f, Y: dpi0_apply(params, v, U, f, Y), fn)


def exp0_pair(alg: RealizedAlgebra, t: float, v, U):
    """Generators of the two one-parameter families (tv, e) and (0, exp tU)."""
    return (t * np.asarray(v, dtype=float), np.eye(alg.dim_matrix)), (np.zeros(alg.dim), exp_group(alg, t * np.asarray(U)))


def equivariance_residuals(alg: RealizedAlgebra, k, Y) -> dict:
    """m(k, y) = m(k⁻¹y)⁻¹ and ã(y) = ã(k⁻¹·y) a(k⁻¹y), with m(k, y) = k̃(y)⁻¹ k k̃(k⁻¹·y)."""
    fr = frame(alg, Y)
    b = bruhat(alg, k.T @ fr.y)
    moved = frame(alg, b.nbar)
    mky = fr.ktilde.T @ k @ moved.ktilde
    return {
        "m": float(np.max(np.abs(mky - np.linalg.inv(b.m)))),
        "atilde": float(np.max(np.abs(fr.log_atilde - moved.log_atilde - b.log_a))),
    }


def unitarity_witness(params: PrincipalSeriesParams, g, fn, nodes: int = 40, scale: float = 1.0) -> float:
    """|∫‖π(g)φ‖² - ∫‖φ‖²| / ∫‖φ‖² by tensor-product Gauss-Hermite quadrature on log-coordinates.

    A diagnostic: the Gaussian weight is divided out, so accuracy depends on
    how well the integrands are resolved by ``nodes`` points per axis.
    """
    import itertools

    alg = params.alg
    x, w = np.polynomial.hermite.hermgauss(nodes)
    x, w = scale * x, scale * w * np.exp(x**2)
    lhs = rhs = 0.0
    for idx in itertools.product(range(nodes), repeat=alg.dim_nbar):
        Y = x[list(idx)]
        weight = float(np.prod(w[list(idx)]))
        rhs += weight * float(np.vdot(fn(Y), fn(Y)).real)
        lhs += weight * float(np.vdot(*(2 * [pi_apply(params, g, fn, Y)])).real)
    return abs(lhs - rhs) / rhs
