"""The closed registry of verification suites.

Every suite takes a :class:`SuiteContext` and returns a :class:`SuiteResult`
made of named checks, each a residual with its tolerance.  Each suite draws
its randomness from its own stream ``(seed, suite index)``, so a suite gives
the same numbers whether it runs alone or inside a full run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import contract as ct
from .errors import NotInBigCell
from .fiber import SpinFiber, check_prop_4_1, sign_character, trivial_character
from .functions import random_test_function, richardson_derivative
from .grp import (
    bruhat,
    exp_group,
    iwasawa,
    lemma21_derivatives,
    log_nbar,
    nbar_matrix,
    random_group_element,
    random_k,
    random_nbar,
)
from .liealg import RealizedAlgebra, check_lemma_3_1, structure_residuals
from .orbits import (
    ProductPoint,
    check_adapted,
    check_symplecto,
    coadjoint_action_residual,
    coadjoint_g0,
    linear_symbol_g0,
    pairing_residuals,
    psi,
    psi0,
    psi0_invert,
    psi1,
    random_point,
    unit_symbol_residual,
    z_prime,
)
from .reps import (
    Operator,
    PrincipalSeriesParams,
    dpi0_apply,
    dpi_apply,
    equivariance_residuals,
    frame,
    g0_mul,
    pi0_apply,
    pi_apply,
    unitarity_witness,
)
from .weyl import (
    PSymbol,
    check_lemma_4_3,
    gaussian_coefficient,
    lemma_4_2_closed_form,
    lemma_4_2_symbol,
    symbol_eval,
    trace_identity_residual,
    unit_index,
    weyl_apply,
)

REGISTRY_VERSION = 1
SUITE_IDS = (
    "algebra",
    "lemma21",
    "lemma31",
    "prop22",
    "prop33",
    "prop41",
    "lemma42",
    "lemma43",
    "prop51",
    "prop52",
    "prop61",
    "prop62",
    "prop53",
    "prop63",
    "prop71",
    "prop81",
    "prop83",
)
SWEEP_SUITES = ("prop71", "prop81", "prop83")


@dataclass
class SuiteContext:
    """Everything a suite needs: the representation data, seed, grid and tolerance overrides.

    ``fiber`` is the configured fibre. ``params`` carries the fibre used by
    the representation suites, which must act on the realization's 𝔪.
    """

    params: PrincipalSeriesParams
    fiber: object
    seed: int = 0
    r_grid: tuple = ct.DEFAULT_R_GRID
    tolerances: dict = field(default_factory=dict)

    @property
    def alg(self) -> RealizedAlgebra:
        return self.params.alg

    def rng(self, suite_id: str):
        return np.random.default_rng([self.seed, SUITE_IDS.index(suite_id)])

    def tol(self, suite_id: str, check: str, default: float) -> float:
        t = self.tolerances
        return float(t.get(f"{suite_id}.{check}", t.get(suite_id, default)))


@dataclass
class SuiteResult:
    suite_id: str
    checks: dict = field(default_factory=dict)  # name -> (residual, tolerance)
    diagnostics: dict = field(default_factory=dict)
    sweeps: list = field(default_factory=list)  # SweepReports

    def add(self, name: str, residual, tolerance: float):
        self.checks[name] = (float(residual), float(tolerance))

    @property
    def passed(self) -> bool:
        sweeps_ok = all(s.passed for s in self.sweeps)
        return sweeps_ok and all(np.isfinite(r) and r <= t for r, t in self.checks.values())

    def binding(self):
        """The check closest to (or furthest over) its tolerance."""
        if not self.checks:
            return 0.0, 0.0
        name = max(self.checks, key=lambda k: _excess(*self.checks[k]))
        return self.checks[name]

    def to_json(self) -> dict:
        residual, tolerance = self.binding()
        details = {
            "checks": {k: {"residual": r, "tolerance": t, "passed": bool(r <= t)} for k, (r, t) in self.checks.items()},
        }
        if self.diagnostics:
            details["diagnostics"] = self.diagnostics
        if self.sweeps:
            details["sweeps"] = {s.check_id: s.to_json() for s in self.sweeps}
        return {
            "status": "pass" if self.passed else "fail",
            "max_residual": residual,
            "tolerance": tolerance,
            "details": details,
        }


def _excess(residual, tolerance):
    if not np.isfinite(residual):
        return np.inf
    return residual / tolerance if tolerance > 0 else (np.inf if residual > 0 else 0.0)


def _probes(alg, dimE, rng, count):
    return [(random_test_function(alg, dimE, rng), random_nbar(alg, rng)) for _ in range(count)]


# Step for finite-difference oracles of the group operators: Richardson at
# h = 1e-3 leaves ~1e-6 truncation error on sl3, h = 1e-4 about 1e-10.
FD_STEP = 1e-4

# Exact identities evaluated through the 1/r phase pick up rounding of order
# 1e-16 / r_min, which is ~1e-13 on the default grid.
PHASE_ROUNDING = 1e-10


# ---------------------------------------------------------------------------
# structure


def suite_algebra(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("algebra")
    s = structure_residuals(ctx.alg)
    exact = ("jacobi", "structure_vs_matrix", "killing_invariance", "killing_symmetry",
             "theta_involution", "theta_automorphism", "theta_eigen")
    for key in exact:
        res.add(key, s[key], ctx.tol("algebra", key, 1e-12))
    for key in ("root_bracket_inclusion", "nbar_orthonormality", "nbar_is_theta_n", "rho_half_trace"):
        res.add(key, s[key], ctx.tol("algebra", key, 1e-9))
    res.add("rank_deficit", s["rank_deficit"], 0.0)
    # β is negative definite on 𝔨 and positive definite on V
    res.add("killing_sign_k", max(0.0, s["killing_neg_def_k"] + 1e-9), 0.0)
    res.add("killing_sign_V", max(0.0, 1e-9 - s["killing_pos_def_V"]), 0.0)
    return res


def suite_lemma31(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("lemma31")
    alg = ctx.alg
    rng = ctx.rng("lemma31")
    xis = [ctx.params.xi1]
    while len(xis) < 6:
        x = alg.random_in("a", rng)
        if alg.is_regular(x):
            xis.append(x)
    rank_gap = ortho = in_k = 0.0
    for x in xis:
        r = check_lemma_3_1(alg, x)
        rank_gap = max(rank_gap, abs(r["rank"] - r["expected_rank"]))
        ortho = max(ortho, r["orthogonality_residual"])
        in_k = max(in_k, r["k_membership_residual"])
    res.add("rank_gap", rank_gap, 0.0)
    res.add("m_orthogonality", ortho, ctx.tol("lemma31", "m_orthogonality", 1e-9))
    res.add("k_membership", in_k, ctx.tol("lemma31", "k_membership", 1e-9))
    res.diagnostics["elements"] = len(xis)
    return res


# ---------------------------------------------------------------------------
# factorizations and the factor-curve derivatives


def _factorization_checks(alg, rng, count=100):
    """Round trips of both factorizations and ã(g⁻¹y) = ã(n̄(g⁻¹y)) a(g⁻¹y)."""
    iw = br = ident = 0.0
    done = 0
    while done < count:
        g = random_group_element(alg, rng, 0.7)
        f = iwasawa(alg, g)
        iw = max(iw, float(np.max(np.abs(f.ktilde @ f.atilde @ f.ntilde - g))))
        try:
            b = bruhat(alg, g)
            y = nbar_matrix(alg, random_nbar(alg, rng))
            h = np.linalg.solve(g, y)
            bh = bruhat(alg, h)
        except NotInBigCell:
            continue
        br = max(br, float(np.max(np.abs(nbar_matrix(alg, b.nbar) @ b.m @ b.a @ b.n - g))))
        lhs = iwasawa(alg, h).log_atilde
        rhs = iwasawa(alg, nbar_matrix(alg, bh.nbar)).log_atilde + bh.log_a
        ident = max(ident, float(np.max(np.abs(lhs - rhs))))
        done += 1
    return iw, br, ident


def suite_lemma21(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("lemma21")
    alg = ctx.alg
    rng = ctx.rng("lemma21")
    iw, br, ident = _factorization_checks(alg, rng)
    res.add("iwasawa_round_trip", iw, ctx.tol("lemma21", "iwasawa_round_trip", 1e-10))
    res.add("bruhat_round_trip", br, ctx.tol("lemma21", "bruhat_round_trip", 1e-10))
    res.add("atilde_identity", ident, ctx.tol("lemma21", "atilde_identity", 1e-9))
    errs = {"da": 0.0, "dm": 0.0, "dnbar": 0.0, "datilde": 0.0}
    for _ in range(20):
        x = alg.random_element(rng)
        Y = random_nbar(alg, rng)
        y = nbar_matrix(alg, Y)
        d = lemma21_derivatives(alg, x, Y)
        curve = lambda t: bruhat(alg, exp_group(alg, t * x) @ y)
        fd_a = richardson_derivative(lambda t: curve(t).log_a)
        # n̄(exp(tX)y) = y exp(tY₀ + O(t²)): differentiate log(y⁻¹ n̄(t))
        fd_n = richardson_derivative(lambda t: log_nbar(alg, np.linalg.solve(y, nbar_matrix(alg, curve(t).nbar))))
        fd_at = richardson_derivative(lambda t: iwasawa(alg, exp_group(alg, t * x) @ y).log_atilde)
        # M is discrete for sl(n): m(t) is locally constant and p_m vanishes
        m_jump = max(float(np.max(np.abs(curve(t).m - curve(0.0).m))) for t in (-1e-3, 1e-3))
        errs["da"] = max(errs["da"], float(np.max(np.abs(fd_a - d["da"]))))
        errs["dnbar"] = max(errs["dnbar"], float(np.max(np.abs(fd_n - d["dnbar"]))))
        errs["datilde"] = max(errs["datilde"], float(np.max(np.abs(fd_at - d["datilde"]))))
        errs["dm"] = max(errs["dm"], m_jump + float(np.max(np.abs(d["dm"]), initial=0.0)))
    for k, v in errs.items():
        res.add(k, v, ctx.tol("lemma21", k, 1e-6))
    return res


# ---------------------------------------------------------------------------
# representations


def _in_cell(fn):
    try:
        fn()
        return True
    except NotInBigCell:
        return False


def suite_prop22(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop22")
    P = ctx.params
    alg = P.alg
    rng = ctx.rng("prop22")
    dimE = P.fiber.dimE
    hom = ident = 0.0
    count = 0
    while count < 20:
        fn, Y = _probes(alg, dimE, rng, 1)[0]
        g, h = random_group_element(alg, rng), random_group_element(alg, rng)
        inner = Operator(lambda f, Z: pi_apply(P, h, f, Z), fn)
        try:
            lhs = pi_apply(P, g, inner, Y)
            rhs = pi_apply(P, g @ h, fn, Y)
        except NotInBigCell:
            continue
        hom = max(hom, float(np.linalg.norm(lhs - rhs)))
        ident = max(ident, float(np.linalg.norm(pi_apply(P, np.eye(alg.dim_matrix), fn, Y) - fn(Y))))
        count += 1
    res.add("homomorphism", hom, ctx.tol("prop22", "homomorphism", 1e-8))
    res.add("identity", ident, ctx.tol("prop22", "identity", 1e-12))
    fd = comm = 0.0
    for fn, Y in _probes(alg, dimE, rng, 10):
        x, z = alg.random_element(rng), alg.random_element(rng)
        num = richardson_derivative(lambda t: pi_apply(P, exp_group(alg, t * x), fn, Y), 0.0, FD_STEP)
        fd = max(fd, float(np.linalg.norm(num - dpi_apply(P, x, fn, Y))))
        dz = Operator(lambda f, Z: dpi_apply(P, z, f, Z), fn)
        dx = Operator(lambda f, Z: dpi_apply(P, x, f, Z), fn)
        lhs = dpi_apply(P, x, dz, Y) - dpi_apply(P, z, dx, Y)
        comm = max(comm, float(np.linalg.norm(lhs - dpi_apply(P, alg.br(x, z), fn, Y))))
    res.add("derivative_vs_fd", fd, ctx.tol("prop22", "derivative_vs_fd", 1e-6))
    res.add("commutator", comm, ctx.tol("prop22", "commutator", 1e-5))
    if alg.dim_nbar == 1:
        fn = random_test_function(alg, dimE, rng)
        res.diagnostics["unitarity_witness"] = unitarity_witness(P, random_group_element(alg, rng, 0.3), fn, nodes=60, scale=2.0)
        res.diagnostics["unitarity_tolerance"] = 1e-3
    return res


def _random_g0(alg, rng, scale=1.0):
    return alg.random_in("V", rng, scale), random_k(alg, rng)


def suite_prop33(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop33")
    P = ctx.params
    alg = P.alg
    rng = ctx.rng("prop33")
    dimE = P.fiber.dimE
    e = np.eye(alg.dim_matrix)
    hom = ident = trans = 0.0
    count = 0
    while count < 20:
        fn, Y = _probes(alg, dimE, rng, 1)[0]
        a, b = _random_g0(alg, rng), _random_g0(alg, rng)
        inner = Operator(lambda f, Z: pi0_apply(P, *b, f, Z), fn)
        try:
            lhs = pi0_apply(P, *a, inner, Y)
            rhs = pi0_apply(P, *g0_mul(alg, a, b), fn, Y)
        except NotInBigCell:
            continue
        hom = max(hom, float(np.linalg.norm(lhs - rhs)))
        ident = max(ident, float(np.linalg.norm(pi0_apply(P, np.zeros(alg.dim), e, fn, Y) - fn(Y))))
        phase = np.exp(1j * alg.beta(frame(alg, Y).Ad_k @ P.xi1, a[0]))
        trans = max(trans, float(np.linalg.norm(pi0_apply(P, a[0], e, fn, Y) - phase * fn(Y))))
        count += 1
    res.add("homomorphism", hom, ctx.tol("prop33", "homomorphism", 1e-8))
    res.add("identity", ident, ctx.tol("prop33", "identity", 1e-12))
    res.add("pure_translation", trans, ctx.tol("prop33", "pure_translation", 1e-12))
    fd = comm = 0.0
    for fn, Y in _probes(alg, dimE, rng, 10):
        v, U = alg.random_in("V", rng), alg.random_in("k", rng)
        # differentiate along (tv, e) and (0, exp tU) separately; dπ₀ is linear
        d1 = richardson_derivative(lambda t: pi0_apply(P, t * v, e, fn, Y), 0.0, FD_STEP)
        d2 = richardson_derivative(lambda t: pi0_apply(P, np.zeros(alg.dim), exp_group(alg, t * U), fn, Y), 0.0, FD_STEP)
        fd = max(fd, float(np.linalg.norm(d1 + d2 - dpi0_apply(P, v, U, fn, Y))))
        v2, U2 = alg.random_in("V", rng), alg.random_in("k", rng)
        d_b = Operator(lambda f, Z: dpi0_apply(P, v2, U2, f, Z), fn)
        d_a = Operator(lambda f, Z: dpi0_apply(P, v, U, f, Z), fn)
        lhs = dpi0_apply(P, v, U, d_b, Y) - dpi0_apply(P, v2, U2, d_a, Y)
        w, W = alg.br(U, v2) - alg.br(U2, v), alg.br(U, U2)
        comm = max(comm, float(np.linalg.norm(lhs - dpi0_apply(P, w, W, fn, Y))))
    res.add("derivative_vs_fd", fd, ctx.tol("prop33", "derivative_vs_fd", 1e-6))
    res.add("commutator", comm, ctx.tol("prop33", "commutator", 1e-5))
    eq_m = eq_a = 0.0
    for _ in range(20):
        r = equivariance_residuals(alg, random_k(alg, rng), random_nbar(alg, rng))
        eq_m, eq_a = max(eq_m, r["m"]), max(eq_a, r["atilde"])
    res.add("equivariance_m", eq_m, ctx.tol("prop33", "equivariance_m", 1e-9))
    res.add("equivariance_atilde", eq_a, ctx.tol("prop33", "equivariance_atilde", 1e-9))
    return res


# ---------------------------------------------------------------------------
# fibre calculus


def _fibre_backends(configured):
    backends = [("trivial-character", trivial_character()), ("sign-character", sign_character())]
    backends += [(f"spin-{j}", SpinFiber(j)) for j in (0.5, 1.0, 1.5)]
    desc = configured.describe()
    if not any(b.describe() == desc for _, b in backends):
        backends.append(("configured", configured))
    return backends


def suite_prop41(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop41")
    worst = {"adjoint": 0.0, "equivariance": 0.0, "dsigma": 0.0, "reconstruction": 0.0, "hw_compat": 0.0, "orbit_norm": 0.0}
    per_backend = {}
    for i, (name, rep) in enumerate(_fibre_backends(ctx.fiber)):
        r = check_prop_4_1(rep, seed=ctx.seed * 101 + i)
        per_backend[name] = r
        for k, v in r.items():
            worst[k] = max(worst[k], v)
    for k in ("adjoint", "equivariance", "dsigma", "hw_compat", "orbit_norm"):
        res.add(k, worst[k], ctx.tol("prop41", k, 1e-10))
    res.add("reconstruction", worst["reconstruction"], ctx.tol("prop41", "reconstruction", 1e-8))
    res.diagnostics["backends"] = per_backend
    return res


# ---------------------------------------------------------------------------
# symbol calculus


def suite_lemma42(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("lemma42")
    P = ctx.params
    alg = P.alg
    rng = ctx.rng("lemma42")
    probes = _probes(alg, P.fiber.dimE, rng, 20)
    jet = auto = 0.0
    for x in np.eye(alg.dim):
        f = lemma_4_2_symbol(alg, P.fiber, x)
        for fn, Y in probes:
            ref = lemma_4_2_closed_form(alg, fn, Y, x)
            jet = max(jet, float(np.linalg.norm(weyl_apply(f, fn, Y, route="jet") - ref)))
            auto = max(auto, float(np.linalg.norm(weyl_apply(f, fn, Y) - ref)))
    res.add("jet_vs_closed_form", jet, ctx.tol("lemma42", "jet_vs_closed_form", 1e-7))
    res.add("degree_one_vs_closed_form", auto, ctx.tol("lemma42", "degree_one_vs_closed_form", 1e-7))
    tr = max(trace_identity_residual(alg, x) for x in list(np.eye(alg.dim)) + [alg.random_element(rng) for _ in range(10)])
    res.add("trace_identity", tr, ctx.tol("lemma42", "trace_identity", 1e-10))
    return res


def lemma_4_3_library(alg: RealizedAlgebra, fiber, rng) -> list:
    """Named pairs of symbols in the u + β(v, φ) + Σ w_k z_k class covering every cross term."""
    n = alg.dim_nbar
    dm = fiber.dim_m
    zero = (0,) * n

    def centre():
        return 0.3 * rng.standard_normal(n)

    def base():
        return PSymbol(alg, fiber, ((zero, gaussian_coefficient(alg, rng.uniform(0.5, 1.5), centre(), rng.uniform(0.2, 0.5))),))

    def lin(k):
        c = gaussian_coefficient(alg, rng.uniform(0.5, 1.5), centre(), rng.uniform(0.2, 0.5))
        return PSymbol(alg, fiber, ((unit_index(n, k), c),))

    def orb():
        amp = rng.standard_normal(dm)
        return PSymbol(alg, fiber, ((zero, gaussian_coefficient(alg, amp, centre(), rng.uniform(0.2, 0.5), "orbit")),))

    def full():
        f = base() + orb() if dm else base()
        for k in range(n):
            f = f + lin(k)
        return f

    other = min(1, n - 1)
    last = n - 1
    pairs = [
        ("base-base", base(), base()),
        ("base-z", base(), lin(0)),
        ("z-base", lin(last), base()),
        ("z-z same", lin(0), lin(0)),
        ("z-z cross", lin(0), lin(other)),
        ("z-z last", lin(other), lin(last)),
        ("full-full", full(), full()),
        ("full-base", full(), base()),
    ]
    if dm:
        pairs += [
            ("base-orbit", base(), orb()),
            ("orbit-base", orb(), base()),
            ("orbit-orbit", orb(), orb()),
            ("z-orbit", lin(0), orb()),
            ("orbit-z", orb(), lin(last)),
            ("full-orbit", full(), orb()),
        ]
    return pairs


def suite_lemma43(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("lemma43")
    alg = ctx.alg
    rng = ctx.rng("lemma43")
    # the orbit terms need a fibre with dim 𝔪 > 0; use spin 1 when the configured one has none
    fiber = ctx.fiber if ctx.fiber.dim_m else SpinFiber(1.0)
    library = lemma_4_3_library(alg, fiber, rng)
    probes = _probes(alg, fiber.dimE, rng, 10)
    worst = 0.0
    per_pair = {}
    for name, f, g in library:
        r = check_lemma_4_3(f, g, probes)["residual"]
        per_pair[name] = r
        worst = max(worst, r)
    res.add("commutator_bracket", worst, ctx.tol("lemma43", "commutator_bracket", 1e-6))
    res.diagnostics["pairs"] = per_pair
    res.diagnostics["fiber"] = fiber.describe()
    return res


# ---------------------------------------------------------------------------
# orbits and adapted correspondences


def _base_point(P):
    n = P.alg.dim_nbar
    return ProductPoint(np.zeros(n), np.zeros(n), P.fiber.xi2)


def suite_prop51(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop51")
    P = ctx.params
    rng = ctx.rng("prop51")
    pr = pairing_residuals(P, rng, 100)
    res.add("pairing", pr["g"], ctx.tol("prop51", "pairing", 1e-9))
    res.add("base_point", np.linalg.norm(psi(P, _base_point(P)) - P.xi0), ctx.tol("prop51", "base_point", 1e-12))
    return res


def suite_prop53(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop53")
    P = ctx.params
    rng = ctx.rng("prop53")
    probes = _probes(P.alg, P.fiber.dimE, rng, 20)
    res.add("adapted", check_adapted(P, "G", probes)["residual"], ctx.tol("prop53", "adapted", 1e-7))
    res.add("adapted_jet", check_adapted(P, "G", probes, "jet")["residual"], ctx.tol("prop53", "adapted_jet", 1e-7))
    res.add("unit_symbol", unit_symbol_residual(P, probes), ctx.tol("prop53", "unit_symbol", 1e-12))
    return res


def suite_prop52(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop52")
    P = ctx.params
    rng = ctx.rng("prop52")
    points = [random_point(P, rng) for _ in range(50)]
    res.add("bracket_identity", check_symplecto(P, "G", points)["residual"], ctx.tol("prop52", "bracket_identity", 1e-6))
    zr = 0.0
    for p in points:
        q = ProductPoint(p.Y, z_prime(P, p.Y, p.Z), p.phi)
        zr = max(zr, float(np.linalg.norm(psi(P, p) - psi1(P, q))))
    res.add("z_prime_relation", zr, ctx.tol("prop52", "z_prime_relation", 1e-9))
    return res


def suite_prop61(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop61")
    P = ctx.params
    alg = P.alg
    rng = ctx.rng("prop61")
    pr = pairing_residuals(P, rng, 100)
    res.add("pairing", pr["g0"], ctx.tol("prop61", "pairing", 1e-9))
    w, U = psi0(P, _base_point(P))
    res.add("base_point", max(np.linalg.norm(w - P.xi1), np.linalg.norm(U - P.xi2)), ctx.tol("prop61", "base_point", 1e-12))
    norm = indep = 0.0
    b0 = alg.beta(P.xi1, P.xi1)
    for _ in range(50):
        p = random_point(P, rng)
        w, _ = psi0(P, p)
        norm = max(norm, abs(alg.beta(w, w) - b0))
        v = alg.random_in("V", rng)
        f = linear_symbol_g0(P, v, np.zeros(alg.dim))
        other = random_point(P, rng)
        indep = max(indep, abs(symbol_eval(f, p.Y, p.Z, p.phi) - symbol_eval(f, p.Y, other.Z, other.phi)))
        indep = max(indep, abs(symbol_eval(f, p.Y, p.Z, p.phi) - alg.beta(frame(alg, p.Y).Ad_k @ P.xi1, v)))
    res.add("translation_norm", norm, ctx.tol("prop61", "translation_norm", 1e-9))
    res.add("translation_symbol", indep, ctx.tol("prop61", "translation_symbol", 1e-9))
    return res


def suite_prop63(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop63")
    P = ctx.params
    rng = ctx.rng("prop63")
    probes = _probes(P.alg, P.fiber.dimE, rng, 20)
    res.add("adapted", check_adapted(P, "G0", probes)["residual"], ctx.tol("prop63", "adapted", 1e-7))
    res.add("adapted_jet", check_adapted(P, "G0", probes, "jet")["residual"], ctx.tol("prop63", "adapted_jet", 1e-7))
    res.add("unit_symbol", unit_symbol_residual(P, probes), ctx.tol("prop63", "unit_symbol", 1e-12))
    return res


def suite_prop62(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop62")
    P = ctx.params
    alg = P.alg
    rng = ctx.rng("prop62")
    points = [random_point(P, rng) for _ in range(50)]
    res.add("bracket_identity", check_symplecto(P, "G0", points)["residual"], ctx.tol("prop62", "bracket_identity", 1e-6))
    res.add("action_law", coadjoint_action_residual(alg, rng, 50), ctx.tol("prop62", "action_law", 1e-9))
    v = alg.random_in("V", rng)
    w, U = coadjoint_g0(alg, (v, np.eye(alg.dim_matrix)), (P.xi1, P.xi2))
    trans = max(np.linalg.norm(w - P.xi1), np.linalg.norm(U - P.xi2 - alg.br(v, P.xi1)))
    res.add("pure_translation", trans, ctx.tol("prop62", "pure_translation", 1e-12))
    # Ψ₀ ∘ invert = id on (v, k)·(ξ₁, ξ₂)
    fwd = 0.0
    done = 0
    while done < 50:
        v, k = alg.random_in("V", rng), random_k(alg, rng)
        try:
            p = psi0_invert(P, v, k)
        except NotInBigCell:
            continue
        target = coadjoint_g0(alg, (v, k), (P.xi1, P.xi2))
        got = psi0(P, p)
        fwd = max(fwd, float(np.linalg.norm(got[0] - target[0])), float(np.linalg.norm(got[1] - target[1])))
        done += 1
    res.add("invert_then_psi0", fwd, ctx.tol("prop62", "invert_then_psi0", 1e-8))
    # invert ∘ Ψ₀ = id: Ψ₀(y, Z, φ) = (v, k)·(ξ₁, ξ₂) with k = k̃(y)m and v solving the V-equation
    back = 0.0
    for p in points:
        v, k = _psi0_witness(P, p)
        q = psi0_invert(P, v, k)
        back = max(back, float(np.linalg.norm(q.Y - p.Y)), float(np.linalg.norm(q.Z - p.Z)),
                   float(np.linalg.norm(np.asarray(q.phi) - np.asarray(p.phi))) if len(p.phi) else 0.0)
    res.add("psi0_then_invert", back, ctx.tol("prop62", "psi0_then_invert", 1e-8))
    return res


def _psi0_witness(P: PrincipalSeriesParams, p: ProductPoint):
    """(v, k) ∈ G₀ with (v, k)·(ξ₁, ξ₂) = Ψ₀(p), for a character fibre (φ = ξ₂ = 0).

    k = k̃(y) gives the V-component; v ∈ V solves [v, Ad(k)ξ₁] = U on
    𝔨 ∩ 𝔪^⊥ (uniquely, since ad ξ₁ maps V onto that space).
    """
    alg = P.alg
    if P.fiber.dim_m:
        raise ValueError("witness construction implemented for character fibres")
    w, U = psi0(P, p)
    k = frame(alg, p.Y).ktilde
    Vb = alg.subspaces["V"]
    A = np.column_stack([alg.br(Vb[:, i], w) for i in range(Vb.shape[1])])
    c = np.linalg.lstsq(A, U, rcond=None)[0]
    return Vb @ c, k


# ---------------------------------------------------------------------------
# contraction sweeps


def _gate(res: SuiteResult, rep):
    """Record a gated sweep and expose its ratio and slope as named checks."""
    res.sweeps.append(rep)
    if rep.criteria.get("identically_zero"):
        return
    lo, hi = ct.SLOPE_BAND
    res.add(f"{rep.check_id}.ratio", rep.ratio if rep.ratio is not None else np.inf, ct.RATIO_MAX)
    res.add(f"{rep.check_id}.slope_deviation", abs(rep.slope - 1.0) if rep.slope is not None else np.inf, (hi - lo) / 2)


def _scenario(ctx: SuiteContext, suite_id: str):
    seed = int(ctx.rng(suite_id).integers(2**31))
    return ct.default_scenario(ctx.params, seed, r_grid=ctx.r_grid)


def suite_prop71(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop71")
    sc = _scenario(ctx, "prop71")
    _gate(res, ct.check_prop_7_1(sc))
    alg = ctx.alg
    rng = ctx.rng("prop71")
    # (0, e) and pure rotations (0, k): π_r(k) = π₀(0, k) exactly, since ã(k⁻¹y) = ã(y)
    e = np.eye(alg.dim_matrix)
    probes = [((np.zeros(alg.dim), e), fn, Y) for (_, fn, Y) in sc.group_probes[:2]]
    probes += [((np.zeros(alg.dim), random_k(alg, rng, 0.5)), fn, Y) for (_, fn, Y) in sc.group_probes[:3]]
    probes = ct.probes_in_cell(alg, sc.r_grid, probes)
    rot = ct.ContractionScenario(sc.params, sc.r_grid, tuple(probes))
    res.add("rotation_probes", max(ct.prop_7_1_errors(rot), default=0.0), ctx.tol("prop71", "rotation_probes", PHASE_ROUNDING))
    # contraction of the group law, reported with its fitted order
    pairs = [(_random_g0(alg, rng), _random_g0(alg, rng)) for _ in range(5)]
    law = ct.check_group_law(alg, pairs, sc.r_grid)
    res.diagnostics["group_law"] = {"errors": law.errors, "slope": law.slope}
    res.sweeps.append(law)
    res.add("group_law_vanishes", law.errors[-1] / law.errors[0] if law.errors[0] else 0.0, ct.RATIO_MAX)
    return res


def suite_prop81(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop81")
    sc = _scenario(ctx, "prop81")
    rep = ct.check_prop_8_1(sc)
    _gate(res, rep)
    res.add("k_component_exact", rep.extra["k_component_residual"], ctx.tol("prop81", "k_component_exact", 1e-10))
    P = ctx.params
    base = ct.ContractionScenario(P, sc.r_grid, points=(_base_point(P),))
    res.add("base_point", max(ct.check_prop_8_1(base).errors), ctx.tol("prop81", "base_point", PHASE_ROUNDING))
    return res


def suite_prop83(ctx: SuiteContext) -> SuiteResult:
    res = SuiteResult("prop83")
    sc = _scenario(ctx, "prop83")
    part1, part2 = ct.check_prop_8_3(sc)
    _gate(res, part1)
    _gate(res, part2)
    res.add("u_only_z_coefficients", part1.extra["u_only_z_coefficient_residual"],
            ctx.tol("prop83", "u_only_z_coefficients", 1e-12))
    alg = ctx.alg
    rng = ctx.rng("prop83")
    pairs = [((alg.random_in("V", rng), alg.random_in("k", rng)), (alg.random_in("V", rng), alg.random_in("k", rng)))
             for _ in range(5)]
    law = ct.check_algebra_law(alg, pairs, sc.r_grid)
    res.diagnostics["algebra_law"] = {"errors": law.errors, "slope": law.slope}
    res.sweeps.append(law)
    res.add("algebra_law_vanishes", law.errors[-1] / law.errors[0] if law.errors[0] else 0.0, ct.RATIO_MAX)
    return res


SUITES = {
    "algebra": suite_algebra,
    "lemma21": suite_lemma21,
    "lemma31": suite_lemma31,
    "prop22": suite_prop22,
    "prop33": suite_prop33,
    "prop41": suite_prop41,
    "lemma42": suite_lemma42,
    "lemma43": suite_lemma43,
    "prop51": suite_prop51,
    "prop52": suite_prop52,
    "prop61": suite_prop61,
    "prop62": suite_prop62,
    "prop53": suite_prop53,
    "prop63": suite_prop63,
    "prop71": suite_prop71,
    "prop81": suite_prop81,
    "prop83": suite_prop83,
}


def run_suite(suite_id: str, ctx: SuiteContext) -> SuiteResult:
    if suite_id not in SUITES:
        raise KeyError(f"unknown suite {suite_id!r}")
    return SUITES[suite_id](ctx)
