"""Coadjoint-orbit parametrizations Ψ, Ψ₁, Ψ₀ and the linear symbols f_X, f_(v,U).

Points of N̄ × n̄ × o(ξ₂) are triples (Y, Z, φ) with Y, Z in (E_i)
coordinates and φ in 𝔪-coordinates of the fibre.  Coadjoint points of 𝔤
are g-coordinates; points of 𝔤₀* ≅ V × 𝔨 are pairs (w, U) of g-coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem
from .grp import adjoint, bruhat, iwasawa, nbar_matrix
from .liealg import RealizedAlgebra
from .reps import PrincipalSeriesParams, frame
from .weyl import Coefficient, PSymbol, poisson_p, symbol_eval, unit_index


@dataclass(frozen=True)
class ProductPoint:
    Y: np.ndarray
    Z: np.ndarray
    phi: np.ndarray


def random_point(params: PrincipalSeriesParams, rng, scale: float = 0.6) -> ProductPoint:
    alg, fib = params.alg, params.fiber
    Y = scale * rng.standard_normal(alg.dim_nbar)
    Z = scale * rng.standard_normal(alg.dim_nbar)
    if fib.dim_m:
        phi = fib.adjoint_m(fib.sample_group(rng), fib.xi2)
    else:
        phi = np.zeros(0)
    return ProductPoint(Y, Z, phi)


def _shift(params, p: ProductPoint) -> np.ndarray:
    """φ - θ(Z) as g-coordinates."""
    alg = params.alg
    return alg.from_m(p.phi) - alg.theta @ alg.from_nbar(p.Z)


def psi(params: PrincipalSeriesParams, p: ProductPoint) -> np.ndarray:
    """Ψ(y, Z, φ) = Ad(k̃(y))ξ₁ + Ad(y)(φ - θZ)."""
    fr = frame(params.alg, p.Y)
    return fr.Ad_k @ params.xi1 + fr.Ad_y @ _shift(params, p)


def psi1(params: PrincipalSeriesParams, p: ProductPoint) -> np.ndarray:
    """Ψ₁(y, Z, φ) = Ad(y)(ξ₁ + φ - θZ)."""
    fr = frame(params.alg, p.Y)
    return fr.Ad_y @ (params.xi1 + _shift(params, p))


def z_prime(params: PrincipalSeriesParams, Y, Z, sign: float = -1.0) -> np.ndarray:
    """Z′ = Z - θ(Ad(ñ(y)⁻¹)ξ₁ - ξ₁), for which Ψ(y, Z, φ) = Ψ₁(y, Z′, φ).

    Since k̃(y) = y ñ(y)⁻¹ ã(y)⁻¹, Ad(k̃(y))ξ₁ = Ad(y)Ad(ñ(y)⁻¹)ξ₁, and the
    shift must cancel -θ: hence the minus sign.  ``sign=+1`` gives the
    other-sign variant, kept for comparison.
    """
    alg = params.alg
    n = iwasawa(alg, nbar_matrix(alg, Y)).ntilde
    d = adjoint(alg, np.linalg.inv(n), params.xi1) - params.xi1
    return np.asarray(Z, dtype=float) + sign * alg.to_nbar(alg.theta @ d)


def psi0(params: PrincipalSeriesParams, p: ProductPoint):
    """Ψ₀(y, Z, φ) = (Ad(k̃(y))ξ₁, p^c_𝔨(Ad(y)(φ - θZ)))."""
    alg = params.alg
    fr = frame(alg, p.Y)
    return fr.Ad_k @ params.xi1, alg.proj("k_c") @ (fr.Ad_y @ _shift(params, p))


def pair0(alg: RealizedAlgebra, xi, vU) -> float:
    """⟨(w, U), (v, U′)⟩ = β(w, v) + β(U, U′)."""
    return alg.beta(xi[0], vU[0]) + alg.beta(xi[1], vU[1])


# ---------------------------------------------------------------------------
# G₀ coadjoint action and bracket


def coadjoint_g0(alg: RealizedAlgebra, gv, xi):
    """(v, k)·(w, U) = (Ad(k)w, Ad(k)U + [v, Ad(k)w])."""
    v, k = gv
    w, U = xi
    kw = adjoint(alg, k, w)
    return kw, adjoint(alg, k, U) + alg.br(np.asarray(v, dtype=float), kw)


def bracket0(alg: RealizedAlgebra, a, b):
    """[(w, U), (w′, U′)]₀ = ([U, w′] - [U′, w], [U, U′])."""
    w, U = a
    w2, U2 = b
    return alg.br(U, w2) - alg.br(U2, w), alg.br(U, U2)


# ---------------------------------------------------------------------------
# coefficient library with exact left derivatives


def ktilde_pairing_coefficient(alg: RealizedAlgebra, xi1, x) -> Coefficient:
    """y ↦ β(Ad(k̃(y))ξ₁, X) = ν(p̃_a(Ad(k̃(y)⁻¹)X))."""
    xi1 = np.asarray(xi1, dtype=float)
    x = np.asarray(x, dtype=float)

    def fn(Y):
        return alg.beta(frame(alg, Y).Ad_k @ xi1, x)

    def deriv(Y, W):
        fr = frame(alg, Y)
        Zg = fr.Ad_y @ alg.from_nbar(W)
        K = alg.proj("k_tilde") @ (fr.Ad_kinv @ Zg)
        return alg.beta(fr.Ad_k @ alg.br(K, xi1), x)

    return Coefficient("scalar", fn, deriv)


def nbar_component_coefficient(alg: RealizedAlgebra, x, k: int) -> Coefficient:
    """y ↦ (E_k, Ad(y⁻¹)X)."""
    x = np.asarray(x, dtype=float)
    Ek = alg.nbar_onb[:, k]
    row = Ek @ alg._inner

    def fn(Y):
        return float(row @ (frame(alg, Y).Ad_yinv @ x))

    def deriv(Y, W):
        Wy = frame(alg, Y).Ad_yinv @ x
        return -float(row @ alg.br(alg.from_nbar(W), Wy))

    return Coefficient("scalar", fn, deriv)


def m_component_coefficient(alg: RealizedAlgebra, x) -> Coefficient:
    """y ↦ p_𝔪(Ad(y⁻¹)X) in 𝔪-coordinates (an orbit coefficient)."""
    x = np.asarray(x, dtype=float)

    def fn(Y):
        return alg.m_coeffs(frame(alg, Y).Ad_yinv @ x)

    def deriv(Y, W):
        Wy = frame(alg, Y).Ad_yinv @ x
        return -alg.m_coeffs(alg.br(alg.from_nbar(W), Wy))

    return Coefficient("orbit", fn, deriv)


def _linear_terms(params, x, base: Coefficient):
    alg = params.alg
    n = alg.dim_nbar
    terms = [((0,) * n, base)]
    if alg.dim_m:
        terms.append(((0,) * n, m_component_coefficient(alg, x)))
    terms += [(unit_index(n, k), nbar_component_coefficient(alg, x, k)) for k in range(n)]
    return tuple(terms)


def linear_symbol_g(params: PrincipalSeriesParams, x) -> PSymbol:
    """f_X(y, Z, φ) = ν(p̃_a(Ad(k̃(y)⁻¹)X)) + β(φ, p_𝔪(Ad(y⁻¹)X)) + (p_n̄(Ad(y⁻¹)X), Z)."""
    base = ktilde_pairing_coefficient(params.alg, params.xi1, x)
    return PSymbol(params.alg, params.fiber, _linear_terms(params, x, base))


def linear_symbol_g0(params: PrincipalSeriesParams, v, U) -> PSymbol:
    """f_(v,U)(y, Z, φ) = β(Ad(k̃(y))ξ₁, v) + the U-part of f_U."""
    base = ktilde_pairing_coefficient(params.alg, params.xi1, v)
    return PSymbol(params.alg, params.fiber, _linear_terms(params, U, base))


def pairing_residuals(params: PrincipalSeriesParams, rng, count: int = 100) -> dict:
    """f_X = β(Ψ, X) and f_(v,U) = ⟨Ψ₀, (v, U)⟩ on random (X, p)."""
    alg = params.alg
    worst_g = worst_g0 = 0.0
    for _ in range(count):
        p = random_point(params, rng)
        x = alg.random_element(rng)
        f = linear_symbol_g(params, x)
        worst_g = max(worst_g, abs(symbol_eval(f, p.Y, p.Z, p.phi) - alg.beta(psi(params, p), x)))
        v, U = alg.random_in("V", rng), alg.random_in("k", rng)
        f0 = linear_symbol_g0(params, v, U)
        worst_g0 = max(worst_g0, abs(symbol_eval(f0, p.Y, p.Z, p.phi) - pair0(alg, psi0(params, p), (v, U))))
    return {"g": worst_g, "g0": worst_g0}


# ---------------------------------------------------------------------------
# bracket identities


def g0_basis(alg: RealizedAlgebra):
    V, K = alg.subspaces["V"], alg.subspaces["k"]
    zero = np.zeros(alg.dim)
    return [(V[:, i], zero) for i in range(V.shape[1])] + [(zero, K[:, i]) for i in range(K.shape[1])]


def check_symplecto(params: PrincipalSeriesParams, which: str, points) -> dict:
    """max |{f_X, f_Y}_p - f_[X,Y]| over basis pairs X < Y and the given points.

    Pairs with X = Y vanish identically on both sides and pairs with X > Y
    follow by antisymmetry, so only X < Y are evaluated.
    """
    alg = params.alg
    if which == "G":
        basis = list(np.eye(alg.dim))
        sym = lambda a: linear_symbol_g(params, a)
        brk = lambda a, b: alg.br(a, b)
    elif which == "G0":
        basis = g0_basis(alg)
        sym = lambda a: linear_symbol_g0(params, *a)
        brk = lambda a, b: bracket0(alg, a, b)
    else:
        raise ValueError(f"unknown group {which!r}; expected 'G' or 'G0'")
    worst = 0.0
    pairs = 0
    syms = [sym(a) for a in basis]
    for i, j in itertools.combinations(range(len(basis)), 2):
        pb = poisson_p(syms[i], syms[j])
        target = sym(brk(basis[i], basis[j]))
        pairs += 1
        for p in points:
            worst = max(worst, abs(symbol_eval(pb, p.Y, p.Z, p.phi) - symbol_eval(target, p.Y, p.Z, p.phi)))
    return {"residual": worst, "pairs": pairs, "points": len(points)}


# ---------------------------------------------------------------------------
# inverting Ψ₀


def psi0_invert(params: PrincipalSeriesParams, v, k, cond_max: float = 1e10) -> ProductPoint:
    """The point p with Ψ₀(p) = (v, k)·(ξ₁, ξ₂).

    y = n̄(k) solves Ad(k̃(y))ξ₁ = Ad(k)ξ₁; with m = k⁻¹k̃(y), φ = Ad(m⁻¹)ξ₂;
    Z is the unique solution of the remaining linear equation on 𝔨 ∩ 𝔪^⊥.
    """
    alg, fib = params.alg, params.fiber
    v = np.asarray(v, dtype=float)
    target_w, target_U = coadjoint_g0(alg, (v, k), (params.xi1, params.xi2))
    Y = bruhat(alg, k).nbar
    fr = frame(alg, Y)
    m = k.T @ fr.ktilde
    if fib.dim_m:
        # φ = Ad(m⁻¹)ξ₂; M-elements of the realization act on 𝔪 by conjugation
        phi_g = adjoint(alg, np.linalg.inv(m), params.xi2)
        phi = alg.m_coeffs(phi_g)
    else:
        phi = np.zeros(0)
    Pk = alg.proj("k_c")
    rhs = Pk @ (fr.Ad_y @ alg.from_m(phi)) - target_U
    A = np.column_stack([Pk @ (fr.Ad_y @ (alg.theta @ alg.nbar_onb[:, i])) for i in range(alg.dim_nbar)])
    # restrict to 𝔨 ∩ 𝔪^⊥ through an orthonormal basis of the column space of A
    s = np.linalg.svd(A, compute_uv=False)
    cond = s[0] / s[-1] if s[-1] > 0 else np.inf
    if cond > cond_max:
        raise SingularSystem(f"equation for Z has condition number {cond:.3g}")
    Z = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return ProductPoint(Y, Z, phi)


# ---------------------------------------------------------------------------
# adapted Weyl correspondence


def check_adapted(params: PrincipalSeriesParams, which: str, probes, route: str = "auto") -> dict:
    """max ‖W(f_X)φ(y) + i dπ(X)φ(y)‖ over basis X and probes (fn, Y).

    With ``which='G0'`` the basis of 𝔤₀ is used with f_(v,U) and dπ₀.
    """
    from .reps import dpi0_apply, dpi_apply
    from .weyl import weyl_apply

    alg = params.alg
    if which == "G":
        items = [(linear_symbol_g(params, x), lambda fn, Y, x=x: dpi_apply(params, x, fn, Y)) for x in np.eye(alg.dim)]
    elif which == "G0":
        items = [
            (linear_symbol_g0(params, v, U), lambda fn, Y, v=v, U=U: dpi0_apply(params, v, U, fn, Y))
            for v, U in g0_basis(alg)
        ]
    else:
        raise ValueError(f"unknown group {which!r}; expected 'G' or 'G0'")
    worst = 0.0
    for f, op in items:
        for fn, Y in probes:
            worst = max(worst, float(np.linalg.norm(weyl_apply(f, fn, Y, route) + 1j * op(fn, Y))))
    return {"residual": worst, "basis": len(items), "probes": len(probes)}


def unit_symbol_residual(params: PrincipalSeriesParams, probes) -> float:
    """max ‖W(1)φ(y) - φ(y)‖: the constant symbol 1 quantizes to the identity."""
    from .weyl import constant, weyl_apply

    f = PSymbol(params.alg, params.fiber, (((0,) * params.alg.dim_nbar, constant(1.0)),))
    return max((float(np.linalg.norm(weyl_apply(f, fn, Y) - fn(Y))) for fn, Y in probes), default=0.0)


def coadjoint_action_residual(alg: RealizedAlgebra, rng, count: int = 50) -> float:
    """max ‖g·(g′·ξ) - (gg′)·ξ‖ over random g, g′ ∈ G₀ and ξ ∈ 𝔤₀*."""
    from .grp import random_k
    from .reps import g0_mul

    worst = 0.0
    for _ in range(count):
        a = (alg.random_in("V", rng), random_k(alg, rng))
        b = (alg.random_in("V", rng), random_k(alg, rng))
        xi = (alg.random_in("V", rng), alg.random_in("k", rng))
        lhs = coadjoint_g0(alg, a, coadjoint_g0(alg, b, xi))
        rhs = coadjoint_g0(alg, g0_mul(alg, a, b), xi)
        worst = max(worst, float(np.max(np.abs(lhs[0] - rhs[0]))), float(np.max(np.abs(lhs[1] - rhs[1]))))
    return worst
