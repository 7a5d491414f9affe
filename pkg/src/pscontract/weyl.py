"""Polynomial symbols on N̄ × n̄ × o(ξ₂), their quantization W and Poisson brackets.

A symbol is a finite sum of terms ``C(y) z^α``.  The coefficient ``C`` is one
of three kinds:

* ``scalar``: C(y) is a real or complex number, quantized as C(y)·I;
* ``orbit``:  C(y) = v(y) ∈ 𝔪 standing for the fibre function β(v(y), φ),
  quantized as -i dσ(v(y));
* ``matrix``: C(y) is an operator on E, whose fibre function is its
  Berezin symbol.

Points of N̄ and Z ∈ n̄ are given in (E_i) coordinates throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegreeTooHigh, NotInRestrictedClass
from .fiber import berezin_symbol
from .functions import left_derivative, mixed_partial
from .grp import nbar_mul
from .liealg import RealizedAlgebra

MAX_DEGREE = 4
KINDS = ("scalar", "orbit", "matrix")


@dataclass(frozen=True, eq=False)
class Coefficient:
    kind: str
    fn: Callable
    deriv: Optional[Callable] = None  # (Y, W) -> d/dt fn(y exp tW)|₀

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")

    def __call__(self, Y):
        return self.fn(Y)

    def left_derivative_with(self, alg, Y, W):
        if self.deriv is not None:
            return self.deriv(Y, W)
        return left_derivative(alg, self.fn, Y, W)


def constant(value, kind: str = "scalar") -> Coefficient:
    val = value if kind == "scalar" else np.asarray(value)
    zero = 0.0 if kind == "scalar" else np.zeros_like(np.asarray(value, dtype=complex if kind == "matrix" else float))
    return Coefficient(kind, lambda Y: val, lambda Y, W: zero)


@dataclass(frozen=True, eq=False)
class PSymbol:
    alg: RealizedAlgebra
    fiber: object
    terms: tuple  # ((alpha, Coefficient), ...)

    def __post_init__(self):
        n = self.alg.dim_nbar
        terms = tuple((tuple(int(a) for a in alpha), c) for alpha, c in self.terms)
        for alpha, _ in terms:
            if len(alpha) != n or min(alpha, default=0) < 0:
                raise ValueError(f"multi-index {alpha} does not match dim n̄ = {n}")
            if sum(alpha) > MAX_DEGREE:
                raise DegreeTooHigh(f"degree {sum(alpha)} exceeds the cap {MAX_DEGREE}")
        object.__setattr__(self, "terms", terms)

    @property
    def degree(self) -> int:
        return max((sum(a) for a, _ in self.terms), default=0)

    def __add__(self, other: "PSymbol") -> "PSymbol":
        return PSymbol(self.alg, self.fiber, self.terms + other.terms)

    def scaled(self, s: complex) -> "PSymbol":
        return PSymbol(self.alg, self.fiber, tuple((a, scale_coefficient(c, s)) for a, c in self.terms))


def unit_index(n: int, k: int) -> tuple:
    e = [0] * n
    e[k] = 1
    return tuple(e)


def scale_coefficient(c: Coefficient, s: complex) -> Coefficient:
    d = None if c.deriv is None else (lambda Y, W: s * c.deriv(Y, W))
    return Coefficient(c.kind, lambda Y: s * c.fn(Y), d)


def coefficient_operator(fiber, c: Coefficient, value) -> np.ndarray:
    """Operator on E quantizing the coefficient value."""
    d = fiber.dimE
    if c.kind == "scalar":
        return complex(value) * np.eye(d)
    if c.kind == "orbit":
        return -1j * fiber.dsigma(value)
    return np.asarray(value, dtype=complex)


def coefficient_symbol(fiber, c: Coefficient, value, phi) -> complex:
    if c.kind == "scalar":
        return complex(value)
    if c.kind == "orbit":
        return complex(fiber.beta_m(value, phi)) if fiber.dim_m else 0.0
    return berezin_symbol(fiber, value, phi)


def symbol_eval(f: PSymbol, Y, Z, phi) -> complex:
    Z = np.asarray(Z, dtype=float)
    total = 0.0j
    for alpha, c in f.terms:
        total += coefficient_symbol(f.fiber, c, c(Y), phi) * np.prod(Z ** np.array(alpha))
    return total


def _jet(f: PSymbol, alpha, c: Coefficient, fn, Y):
    alg = f.alg
    fib = f.fiber

    def F(Z):
        return coefficient_operator(fib, c, c(nbar_mul(alg, Y, 0.5 * Z))) @ fn(nbar_mul(alg, Y, Z))

    return (1j) ** sum(alpha) * mixed_partial(F, np.zeros(alg.dim_nbar), alpha)


def weyl_apply(f: PSymbol, fn, Y, route: str = "auto") -> np.ndarray:
    """(W(f)φ)(y).

    ``route='auto'`` uses the closed forms for degree 0 and 1 terms and jets
    above; ``route='jet'`` uses jets for every term of positive degree.
    """
    if f.degree > MAX_DEGREE:
        raise DegreeTooHigh(f"degree {f.degree} exceeds the cap {MAX_DEGREE}")
    alg, fib = f.alg, f.fiber
    Y = np.asarray(Y, dtype=float)
    phi_y = None
    out = np.zeros(fib.dimE, dtype=complex)
    for alpha, c in f.terms:
        deg = sum(alpha)
        if deg == 0:
            if phi_y is None:
                phi_y = fn(Y)
            out = out + coefficient_operator(fib, c, c(Y)) @ phi_y
        elif deg == 1 and route == "auto":
            if phi_y is None:
                phi_y = fn(Y)
            k = alpha.index(1)
            Ek = np.eye(alg.dim_nbar)[k]
            dC = coefficient_operator(fib, c, c.left_derivative_with(alg, Y, Ek))
            C = coefficient_operator(fib, c, c(Y))
            out = out + 1j * (0.5 * dC @ phi_y + C @ left_derivative(alg, fn, Y, Ek))
        else:
            out = out + _jet(f, alpha, c, fn, Y)
    return out


class WeylOperator:
    """y ↦ (W(f)φ)(y) as a callable, so operators can be composed."""

    def __init__(self, f: PSymbol, fn, route: str = "auto"):
        self.f, self.fn, self.route = f, fn, route

    def __call__(self, Y):
        return weyl_apply(self.f, self.fn, Y, self.route)


def weyl_op(f: PSymbol, route: str = "auto"):
    return lambda fn: WeylOperator(f, fn, route)


# ---------------------------------------------------------------------------
# Poisson bracket on the class u(y) + β(v(y), φ) + Σ w_k(y) z_k


def _split_restricted(f: PSymbol):
    n = f.alg.dim_nbar
    base, orbit, lin = [], [], {k: [] for k in range(n)}
    for alpha, c in f.terms:
        deg = sum(alpha)
        if deg == 0 and c.kind == "scalar":
            base.append(c)
        elif deg == 0 and c.kind == "orbit":
            orbit.append(c)
        elif deg == 1 and c.kind == "scalar":
            lin[alpha.index(1)].append(c)
        else:
            raise NotInRestrictedClass(f"term z^{alpha} with {c.kind} coefficient is outside the bracket class")
    return base, orbit, lin


def _sum_coeff(alg, cs, kind, zero):
    if not cs:
        return None
    if len(cs) == 1:
        return cs[0]
    return Coefficient(
        kind,
        lambda Y: sum((c(Y) for c in cs), zero),
        lambda Y, W: sum((c.left_derivative_with(alg, Y, W) for c in cs), zero),
    )


def _deriv_fn(alg, c: Coefficient, k: int):
    Ek = np.eye(alg.dim_nbar)[k]
    return lambda Y: c.left_derivative_with(alg, Y, Ek)


def poisson_p(f: PSymbol, g: PSymbol) -> PSymbol:
    """{f, g}_p for symbols of the restricted class.

    With E_k the left-invariant fields, ∂_k = ∂/∂z_k and
    {z_k, z_l} = β(θZ, [E_k, E_l]) = -Σ_m c^m_kl z_m,

        {F, G} = Σ_k (E_k F ∂_k G - ∂_k F E_k G) + Σ_kl ∂_k F ∂_l G {z_k, z_l}
                 + {·,·}₂ on the orbit-linear parts.
    """
    alg, fib = f.alg, f.fiber
    n = alg.dim_nbar
    fb, fo, fl = _split_restricted(f)
    gb, go, gl = _split_restricted(g)
    dm = fib.dim_m
    u_f, u_g = _sum_coeff(alg, fb, "scalar", 0.0), _sum_coeff(alg, gb, "scalar", 0.0)
    v_f, v_g = _sum_coeff(alg, fo, "orbit", np.zeros(dm)), _sum_coeff(alg, go, "orbit", np.zeros(dm))
    w_f = {k: _sum_coeff(alg, fl[k], "scalar", 0.0) for k in range(n)}
    w_g = {k: _sum_coeff(alg, gl[k], "scalar", 0.0) for k in range(n)}

    terms = []
    zero_idx = (0,) * n

    for k in range(n):
        # Σ_k E_k(F) ∂_k G: ∂_k G = w'_k
        if w_g[k] is not None:
            wk = w_g[k]
            if u_f is not None:
                d = _deriv_fn(alg, u_f, k)
                terms.append((zero_idx, Coefficient("scalar", lambda Y, d=d, wk=wk: d(Y) * wk(Y))))
            if v_f is not None:
                d = _deriv_fn(alg, v_f, k)
                terms.append((zero_idx, Coefficient("orbit", lambda Y, d=d, wk=wk: wk(Y) * d(Y))))
            for m in range(n):
                if w_f[m] is not None:
                    d = _deriv_fn(alg, w_f[m], k)
                    terms.append((unit_index(n, m), Coefficient("scalar", lambda Y, d=d, wk=wk: d(Y) * wk(Y))))
        # - Σ_k ∂_k F E_k(G)
        if w_f[k] is not None:
            wk = w_f[k]
            if u_g is not None:
                d = _deriv_fn(alg, u_g, k)
                terms.append((zero_idx, Coefficient("scalar", lambda Y, d=d, wk=wk: -d(Y) * wk(Y))))
            if v_g is not None:
                d = _deriv_fn(alg, v_g, k)
                terms.append((zero_idx, Coefficient("orbit", lambda Y, d=d, wk=wk: -wk(Y) * d(Y))))
            for m in range(n):
                if w_g[m] is not None:
                    d = _deriv_fn(alg, w_g[m], k)
                    terms.append((unit_index(n, m), Coefficient("scalar", lambda Y, d=d, wk=wk: -d(Y) * wk(Y))))
    # Σ_kl w_k w'_l {z_k, z_l} = -Σ_m (Σ_kl c^m_kl w_k w'_l) z_m
    C = alg.nbar_structure
    for k in range(n):
        for l in range(n):
            if w_f[k] is None or w_g[l] is None:
                continue
            for m in range(n):
                if abs(C[k, l, m]) < 1e-14:
                    continue
                coef = -C[k, l, m]
                a, b = w_f[k], w_g[l]
                terms.append((unit_index(n, m), Coefficient("scalar", lambda Y, a=a, b=b, s=coef: s * a(Y) * b(Y))))
    # orbit part: {β(v, φ), β(v', φ)}₂ = β(φ, [v, v'])
    if v_f is not None and v_g is not None and dm:
        terms.append((zero_idx, Coefficient("orbit", lambda Y: fib.bracket_m(v_f(Y), v_g(Y)))))
    return PSymbol(alg, fib, tuple(terms))


def check_lemma_4_3(f: PSymbol, g: PSymbol, probes) -> dict:
    """max over probes of ‖([W(f), W(g)] + i W({f,g}_p)) φ (y)‖."""
    h = poisson_p(f, g)
    worst = 0.0
    for fn, Y in probes:
        lhs = weyl_apply(f, WeylOperator(g, fn), Y) - weyl_apply(g, WeylOperator(f, fn), Y)
        rhs = -1j * weyl_apply(h, fn, Y)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return {"residual": worst, "probes": len(probes)}


# ---------------------------------------------------------------------------
# The linear symbol (p_n̄(Ad(y⁻¹)X), Z) and its closed-form quantization


def trace_identity_residual(alg: RealizedAlgebra, x) -> float:
    """|Tr_n̄(p_n̄ ∘ ad Y) + 2ρ(p_a Y)|, trace taken on the (E_i) basis."""
    x = np.asarray(x, dtype=float)
    E = alg.nbar_onb
    M = np.array([alg.to_nbar(alg.br(x, E[:, j])) for j in range(E.shape[1])]).T
    return abs(float(np.trace(M)) + 2.0 * float(alg.rho_functional() @ x))


def gaussian_coefficient(alg: RealizedAlgebra, amplitude, center, width: float, kind: str = "scalar") -> Coefficient:
    """C(y) = amplitude · exp(-width ‖Y - center‖²), with an exact derivative hook.

    ``amplitude`` is a number for scalar coefficients and an 𝔪-vector for
    orbit coefficients.
    """
    from .grp import nbar_left_jacobian

    amp = np.asarray(amplitude, dtype=float) if kind == "orbit" else amplitude
    center = np.asarray(center, dtype=float)

    def fn(Y):
        d = np.asarray(Y, dtype=float) - center
        return amp * np.exp(-width * (d @ d))

    def deriv(Y, W):
        Y = np.asarray(Y, dtype=float)
        d = Y - center
        rate = -2.0 * width * (d @ (nbar_left_jacobian(alg, Y) @ np.asarray(W, dtype=float)))
        return amp * rate * np.exp(-width * (d @ d))

    return Coefficient(kind, fn, deriv)


def lemma_4_2_symbol(alg: RealizedAlgebra, fiber, x) -> PSymbol:
    """f(y, Z, φ) = (p_n̄(Ad(y⁻¹)X), Z) = Σ_k (E_k, Ad(y⁻¹)X) z_k."""
    from .orbits import nbar_component_coefficient

    n = alg.dim_nbar
    return PSymbol(alg, fiber, tuple((unit_index(n, k), nbar_component_coefficient(alg, x, k)) for k in range(n)))


def lemma_4_2_closed_form(alg: RealizedAlgebra, fn, Y, x) -> np.ndarray:
    """-i ρ(p_a(Ad(y⁻¹)X)) φ(y) + i d/dt φ(y exp(t p_n̄(Ad(y⁻¹)X)))|₀."""
    from .grp import adjoint, nbar_matrix

    W = adjoint(alg, np.linalg.inv(nbar_matrix(alg, Y)), x)
    rho = float(alg.rho_functional() @ W)
    return -1j * rho * fn(Y) + 1j * left_derivative(alg, fn, Y, alg.to_nbar(W))
