"""Matrix realizations of noncompact semisimple Lie algebras.

Algebra elements are plain coordinate vectors in ``alg.basis``; every
function takes the realization as its first argument.  Construction does
the full structural dissection once: Killing form, Cartan involution,
Cartan decomposition k ⊕ V, restricted roots with respect to a, the
centralizer m, the nilpotent pieces n / n̄, ρ and the projectors for the
three decompositions

    g = n̄ ⊕ m ⊕ a ⊕ n        (p_nbar, p_m, p_a, p_n)
    g = k ⊕ a ⊕ n            (p_k_tilde, p_a_tilde, p_n_tilde)
    g = k ⊕ V                (p_k_c, p_V_c)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NonRegular

ROOT_TOL = 1e-8


@dataclass(frozen=True)
class Root:
    values: np.ndarray  # λ(H_i) on the a-basis
    space: np.ndarray  # (d, mult) coordinate basis of g_λ
    positive: bool

    @property
    def multiplicity(self) -> int:
        return self.space.shape[1]


@dataclass(frozen=True, eq=False)
class RealizedAlgebra:
    name: str
    dim_matrix: int
    basis: np.ndarray
    structure_constants: np.ndarray
    killing_matrix: np.ndarray
    theta: np.ndarray
    subspaces: dict
    roots: tuple
    rho: np.ndarray
    nbar_onb: np.ndarray
    projectors: dict
    positive_element: np.ndarray
    integral: bool = False
    # derived caches
    _coord_solve: np.ndarray = field(repr=False, default=None)
    _ad: np.ndarray = field(repr=False, default=None)
    _inner: np.ndarray = field(repr=False, default=None)
    _nbar_dual: np.ndarray = field(repr=False, default=None)
    _a_dual: np.ndarray = field(repr=False, default=None)
    _m_dual: np.ndarray = field(repr=False, default=None)
    nbar_structure: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim_nbar(self) -> int:
        return self.nbar_onb.shape[1]

    @property
    def dim_m(self) -> int:
        return self.subspaces["m"].shape[1]

    @property
    def dim_a(self) -> int:
        return self.subspaces["a"].shape[1]

    # coordinates <-> matrices
    def matrix(self, x) -> np.ndarray:
        return np.tensordot(np.asarray(x, dtype=float), self.basis, axes=1)

    def coords(self, M) -> np.ndarray:
        return self._coord_solve @ np.asarray(M).reshape(-1)

    def br(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.structure_constants)

    def ad(self, x) -> np.ndarray:
        return np.tensordot(x, self._ad, axes=1)

    def beta(self, x, y) -> float:
        return float(x @ self.killing_matrix @ y)

    def inner(self, x, y) -> float:
        """(Y, Z) = -β(Y, θZ), positive definite."""
        return float(x @ self._inner @ y)

    def proj(self, which: str) -> np.ndarray:
        return self.projectors[which]

    # a, m and n̄ helpers
    def a_coeffs(self, x) -> np.ndarray:
        """Coefficients of p_a(x) on the a-basis."""
        return self._a_dual @ x

    def m_coeffs(self, x) -> np.ndarray:
        """Coefficients of p_m(x) on the m-basis."""
        return self._m_dual @ x

    def from_m(self, c) -> np.ndarray:
        return self.subspaces["m"] @ np.asarray(c, dtype=float)

    def to_nbar(self, x) -> np.ndarray:
        """Coordinates of p_nbar(x) on the orthonormal basis (E_i)."""
        return self._nbar_dual @ x

    def from_nbar(self, Y) -> np.ndarray:
        return self.nbar_onb @ np.asarray(Y, dtype=float)

    def root_values(self, x) -> np.ndarray:
        h = self.a_coeffs(x)
        return np.array([r.values @ h for r in self.roots])

    def is_regular(self, x, tol: float = ROOT_TOL) -> bool:
        return bool(np.min(np.abs(self.root_values(x))) > tol)

    def rho_functional(self) -> np.ndarray:
        """Row vector on g-coordinates computing ρ(p_a x)."""
        return self.rho @ self._a_dual

    def random_element(self, rng, scale: float = 1.0) -> np.ndarray:
        return scale * rng.standard_normal(self.dim)

    def random_in(self, which: str, rng, scale: float = 1.0) -> np.ndarray:
        B = self.subspaces[which]
        return B @ (scale * rng.standard_normal(B.shape[1]))

    def to_json(self) -> dict:
        sc = self.structure_constants
        triples = [
            [int(i), int(j), int(k), float(sc[i, j, k])]
            for i, j, k in zip(*np.nonzero(np.abs(sc) > 1e-14))
        ]
        return {
            "name": self.name,
            "dim": self.dim,
            "dim_matrix": self.dim_matrix,
            "basis": [b.tolist() for b in self.basis],
            "structure_constants": triples,
            "killing_matrix": self.killing_matrix.tolist(),
            "theta": self.theta.tolist(),
            "subspaces": {k: v.T.tolist() for k, v in self.subspaces.items()},
            "roots": [
                {
                    "values": r.values.tolist(),
                    "multiplicity": r.multiplicity,
                    "positive": r.positive,
                    "space": r.space.T.tolist(),
                }
                for r in self.roots
            ],
            "rho": self.rho.tolist(),
            "nbar_onb": self.nbar_onb.T.tolist(),
        }


def _clean(A, integral: bool):
    if not integral:
        return A
    R = np.rint(A)
    return np.where(np.abs(A - R) < 1e-10, R, A)


def _independent_columns(M, tol: float = 1e-9) -> np.ndarray:
    cols = []
    for j in range(M.shape[1]):
        c = M[:, j]
        if np.linalg.norm(c) < tol:
            continue
        trial = np.column_stack(cols + [c])
        if np.linalg.matrix_rank(trial, tol=tol) == len(cols) + 1:
            cols.append(c)
    if not cols:
        return np.zeros((M.shape[0], 0))
    return np.column_stack(cols)


def _split_clusters(vals, tol):
    groups, cur = [], [0]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > tol:
            groups.append(cur)
            cur = []
        cur.append(i)
    groups.append(cur)
    return groups


def _joint_eigenspaces(ads, L):
    """Simultaneous diagonalization of commuting B_θ-symmetric maps.

    Returns a list of (eigenvalue tuple, coordinate basis) pairs.
    """
    d = L.shape[0]
    Linv_T = np.linalg.inv(L.T)
    sym = [L.T @ A @ Linv_T for A in ads]
    pieces = [(np.eye(d), [])]
    for S in sym:
        refined = []
        for Q, vals in pieces:
            block = Q.T @ S @ Q
            block = 0.5 * (block + block.T)
            ev, U = np.linalg.eigh(block)
            for g in _split_clusters(ev, ROOT_TOL):
                refined.append((Q @ U[:, g], vals + [float(np.mean(ev[g]))]))
        pieces = refined
    return [(np.array(vals), Linv_T @ Q) for Q, vals in pieces]


def _realize(name, basis, theta_matrix, a_basis, positive_element, integral):
    d = basis.shape[0]
    N = basis.shape[1]
    flat = basis.reshape(d, N * N).T
    coord_solve = np.linalg.pinv(flat)

    def coords(M):
        return _clean(coord_solve @ M.reshape(-1), integral)

    sc = np.zeros((d, d, d))
    for i, j in itertools.product(range(d), repeat=2):
        sc[i, j] = coords(basis[i] @ basis[j] - basis[j] @ basis[i])
    ad = np.transpose(sc, (0, 2, 1))  # ad[i][k, j] = c[i, j, k]
    killing = _clean(np.einsum("iab,jba->ij", ad, ad), integral)
    theta = np.column_stack([coords(theta_matrix(b)) for b in basis])
    inner = -killing @ theta
    inner = 0.5 * (inner + inner.T)
    L = np.linalg.cholesky(inner)

    I = np.eye(d)
    k_basis = _clean(_independent_columns(0.5 * (I + theta)), integral)
    V_basis = _clean(_independent_columns(0.5 * (I - theta)), integral)

    a_ads = [np.tensordot(a_basis[:, i], ad, axes=1) for i in range(a_basis.shape[1])]
    Linv_T = np.linalg.inv(L.T)
    roots, g0 = [], None
    h0 = np.linalg.lstsq(a_basis, positive_element, rcond=None)[0]
    for vals, Q in _joint_eigenspaces(a_ads, L):
        # B_θ-orthogonal projector onto the joint eigenspace, applied to the
        # basis vectors, so root spaces are spanned by basis-adapted vectors.
        Qo = L.T @ Q
        P = Linv_T @ Qo @ Qo.T @ L.T
        space = _clean(_independent_columns(P), integral)
        if np.all(np.abs(vals) < ROOT_TOL):
            g0 = space
            continue
        vals = _clean(vals, integral)
        roots.append(Root(values=vals, space=space, positive=bool(vals @ h0 > 0)))
    roots.sort(key=lambda r: (not r.positive, tuple(-r.values)))
    m_basis = _clean(_independent_columns(0.5 * (I + theta) @ g0), integral)
    if m_basis.shape[1] == 0:
        m_basis = np.zeros((d, 0))

    n_basis = np.column_stack([r.space for r in roots if r.positive])
    nbar_basis = np.column_stack([r.space for r in roots if not r.positive])
    # order n̄ by position of the leading basis vector for a stable (E_i)
    order = np.argsort([np.argmax(np.abs(c) > 1e-12) for c in nbar_basis.T], kind="stable")
    nbar_basis = nbar_basis[:, order]

    def projectors_for(parts):
        B = np.column_stack([p for _, p in parts])
        Binv = np.linalg.inv(B)
        out, start = {}, 0
        for key, p in parts:
            k = p.shape[1]
            out[key] = B[:, start:start + k] @ Binv[start:start + k, :]
            start += k
        return out

    projectors = {}
    projectors.update(projectors_for([("nbar", nbar_basis), ("m", m_basis), ("a", a_basis), ("n", n_basis)]))
    projectors.update(
        {k + "_tilde": v for k, v in projectors_for([("k", k_basis), ("a", a_basis), ("n", n_basis)]).items()}
    )
    projectors.update({k + "_c": v for k, v in projectors_for([("k", k_basis), ("V", V_basis)]).items()})

    # Gram-Schmidt on n̄ for (Y, Z) = -β(Y, θZ)
    onb = []
    for c in nbar_basis.T:
        w = c.copy()
        for e in onb:
            w = w - (e @ inner @ w) * e
        onb.append(w / np.sqrt(w @ inner @ w))
    nbar_onb = np.column_stack(onb)

    rho = 0.5 * sum(r.multiplicity * r.values for r in roots if r.positive)

    a_dual = np.linalg.pinv(a_basis) @ projectors["a"]
    m_dual = (np.linalg.pinv(m_basis) @ projectors["m"]) if m_basis.shape[1] else np.zeros((0, d))
    nbar_dual = nbar_onb.T @ inner
    n = nbar_onb.shape[1]
    nbar_structure = np.zeros((n, n, n))
    for i, j in itertools.product(range(n), repeat=2):
        b = np.einsum("i,j,ijk->k", nbar_onb[:, i], nbar_onb[:, j], sc)
        nbar_structure[i, j] = nbar_dual @ b

    subspaces = {
        "k": k_basis,
        "V": V_basis,
        "a": a_basis,
        "m": m_basis,
        "n": n_basis,
        "nbar": nbar_basis,
    }
    return RealizedAlgebra(
        name=name,
        dim_matrix=N,
        basis=basis,
        structure_constants=sc,
        killing_matrix=killing,
        theta=theta,
        subspaces=subspaces,
        roots=tuple(roots),
        rho=rho,
        nbar_onb=nbar_onb,
        projectors=projectors,
        positive_element=positive_element,
        integral=integral,
        _coord_solve=coord_solve,
        _ad=ad,
        _inner=inner,
        _nbar_dual=nbar_dual,
        _a_dual=a_dual,
        _m_dual=m_dual,
        nbar_structure=nbar_structure,
    )


def _unit(n, i, j):
    E = np.zeros((n, n))
    E[i, j] = 1.0
    return E


_CACHE: dict = {}


def build_sl(n: int) -> RealizedAlgebra:
    """sl(n, R) with θ(X) = -Xᵀ, a = traceless diagonal.

    Basis: H_i = e_ii - e_{i+1,i+1} (i < n-1), then e_ij (i != j) row-major.
    The positive chamber contains diag(n-1, ..., 1, 0) - mean, which on
    the e_i - e_j roots is the lexicographic order on diagonal entries.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"sl(n) needs integer n >= 2, got {n!r}")
    n = int(n)
    if n in _CACHE:
        return _CACHE[n]
    mats = [_unit(n, i, i) - _unit(n, i + 1, i + 1) for i in range(n - 1)]
    mats += [_unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    basis = np.array(mats)
    a_basis = np.zeros((len(mats), n - 1))
    a_basis[: n - 1, : n - 1] = np.eye(n - 1)
    diag = np.arange(n - 1, -1, -1, dtype=float)
    diag -= diag.mean()
    flat = basis.reshape(len(mats), -1).T
    h0 = np.linalg.pinv(flat) @ np.diag(diag).reshape(-1)
    alg = _realize(f"sl{n}", basis, lambda X: -X.T, a_basis, h0, integral=True)
    _CACHE[n] = alg
    return alg


REALIZATIONS = {"sl2": lambda: build_sl(2), "sl3": lambda: build_sl(3), "sl4": lambda: build_sl(4)}


def get_realization(name: str) -> RealizedAlgebra:
    try:
        return REALIZATIONS[name]()
    except KeyError:
        raise ValueError(f"unknown realization {name!r}; choose from {sorted(REALIZATIONS)}") from None


# ---------------------------------------------------------------------------
# Operations on coordinate vectors


def _check(alg, *xs):
    for x in xs:
        if np.shape(x) != (alg.dim,):
            raise ValueError(f"expected a coordinate vector of length {alg.dim} for {alg.name}, got shape {np.shape(x)}")


def bracket(alg: RealizedAlgebra, x, y) -> np.ndarray:
    """[X, Y] via the matrix commutator, re-expressed in coordinates."""
    _check(alg, x, y)
    X, Y = alg.matrix(x), alg.matrix(y)
    return alg.coords(X @ Y - Y @ X)


def killing(alg: RealizedAlgebra, x, y) -> float:
    _check(alg, x, y)
    return alg.beta(np.asarray(x, float), np.asarray(y, float))


PROJECTIONS = {
    "a": "a",
    "m": "m",
    "nbar": "nbar",
    "n": "n",
    "a_tilde": "a_tilde",
    "k_tilde": "k_tilde",
    "n_tilde": "n_tilde",
    "k_c": "k_c",
    "V_c": "V_c",
}


def project(alg: RealizedAlgebra, x, which: str) -> np.ndarray:
    _check(alg, x)
    if which not in PROJECTIONS:
        raise ValueError(f"unknown projection {which!r}")
    return alg.proj(PROJECTIONS[which]) @ np.asarray(x, float)


def rho_of(alg: RealizedAlgebra, h, tol: float = 1e-10) -> float:
    """ρ(H) = ½ Σ_{λ>0} dim(g_λ) λ(H) for H in a."""
    _check(alg, h)
    h = np.asarray(h, float)
    resid = np.linalg.norm(h - alg.proj("a") @ h)
    if resid > tol * max(1.0, np.linalg.norm(h)):
        raise ValueError(f"element is not in a (residual {resid:.3g})")
    return float(alg.rho @ alg.a_coeffs(h))


def check_lemma_3_1(alg: RealizedAlgebra, xi1, tol: float = 1e-9) -> dict:
    """ad ξ₁(V) is the β-orthogonal complement of m in k, for regular ξ₁."""
    _check(alg, xi1)
    xi1 = np.asarray(xi1, float)
    if not alg.is_regular(xi1):
        raise NonRegular("some restricted root vanishes on xi1")
    image = alg.ad(xi1) @ alg.subspaces["V"]
    s = np.linalg.svd(image, compute_uv=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    expected = alg.subspaces["k"].shape[1] - alg.dim_m
    m = alg.subspaces["m"]
    ortho = float(np.max(np.abs(image.T @ alg.killing_matrix @ m))) if m.shape[1] else 0.0
    in_k = float(np.max(np.abs(alg.proj("V_c") @ image))) if image.size else 0.0
    return {
        "rank": rank,
        "expected_rank": expected,
        "orthogonality_residual": ortho,
        "k_membership_residual": in_k,
        "ok": rank == expected and ortho <= tol and in_k <= tol,
    }


def structure_residuals(alg: RealizedAlgebra) -> dict:
    """Residuals of the structural invariants over all basis elements/triples."""
    d = alg.dim
    I = np.eye(d)
    sc = alg.structure_constants
    out = {}
    # Jacobi: [x,[y,z]] + cyclic
    jac = (
        np.einsum("jkl,ilm->ijkm", sc, sc)
        + np.einsum("kil,jlm->ijkm", sc, sc)
        + np.einsum("ijl,klm->ijkm", sc, sc)
    )
    out["jacobi"] = float(np.max(np.abs(jac)))
    # matrix commutators agree with structure constants
    err = 0.0
    for i, j in itertools.product(range(d), repeat=2):
        M = alg.basis[i] @ alg.basis[j] - alg.basis[j] @ alg.basis[i]
        err = max(err, float(np.max(np.abs(alg.matrix(sc[i, j]) - M))))
    out["structure_vs_matrix"] = err
    # ad-invariance β([x,y],z) + β(y,[x,z]) = 0
    K = alg.killing_matrix
    inv = np.einsum("ijl,lk->ijk", sc, K) + np.einsum("ikl,jl->ijk", sc, K)
    out["killing_invariance"] = float(np.max(np.abs(inv)))
    out["killing_symmetry"] = float(np.max(np.abs(K - K.T)))
    th = alg.theta
    out["theta_involution"] = float(np.max(np.abs(th @ th - I)))
    # θ is an automorphism
    auto = np.einsum("ijk,lk->ijl", sc, th) - np.einsum("ai,bj,abk->ijk", th, th, sc)
    out["theta_automorphism"] = float(np.max(np.abs(auto)))
    kb, Vb = alg.subspaces["k"], alg.subspaces["V"]
    out["theta_eigen"] = float(max(np.max(np.abs(th @ kb - kb)), np.max(np.abs(th @ Vb + Vb))))
    out["killing_neg_def_k"] = float(np.max(np.linalg.eigvalsh(kb.T @ K @ kb)))
    out["killing_pos_def_V"] = float(np.min(np.linalg.eigvalsh(Vb.T @ K @ Vb)))
    # root-space bracket inclusion [g_λ, g_μ] ⊆ g_{λ+μ}, g_0 = a ⊕ m
    spaces = [(np.zeros(alg.dim_a), np.column_stack([alg.subspaces["a"], alg.subspaces["m"]]))]
    spaces += [(r.values, r.space) for r in alg.roots]
    lookup = {tuple(np.round(v, 6)): S for v, S in spaces}
    incl = 0.0
    for (lv, Sl), (mv, Sm) in itertools.product(spaces, repeat=2):
        target = lookup.get(tuple(np.round(lv + mv, 6)))
        for a, b in itertools.product(Sl.T, Sm.T):
            c = alg.br(a, b)
            if target is None:
                resid = np.linalg.norm(c)
            else:
                coef = np.linalg.lstsq(target, c, rcond=None)[0]
                resid = np.linalg.norm(target @ coef - c)
            incl = max(incl, float(resid))
    out["root_bracket_inclusion"] = incl
    # decomposition ranks
    nb = alg.subspaces
    full1 = np.column_stack([nb["nbar"], nb["m"], nb["a"], nb["n"]])
    full2 = np.column_stack([nb["k"], nb["a"], nb["n"]])
    full3 = np.column_stack([nb["k"], nb["V"]])
    out["rank_deficit"] = int(
        3 * d - np.linalg.matrix_rank(full1) - np.linalg.matrix_rank(full2) - np.linalg.matrix_rank(full3)
    ) + abs(full1.shape[1] - d) + abs(full2.shape[1] - d) + abs(full3.shape[1] - d)
    E = alg.nbar_onb
    out["nbar_orthonormality"] = float(np.max(np.abs(E.T @ alg._inner @ E - np.eye(E.shape[1]))))
    out["nbar_is_theta_n"] = float(
        np.max(np.abs(alg.proj("n") @ (th @ nb["nbar"]) - th @ nb["nbar"]))
    )
    # brute-force ρ against ½ trace of ad on n
    rho_err = 0.0
    for i in range(alg.dim_a):
        h = alg.subspaces["a"][:, i]
        A = alg.ad(h)
        P = alg.proj("n")
        rho_err = max(rho_err, abs(rho_of(alg, h) - 0.5 * np.trace(P @ A @ P)))
    out["rho_half_trace"] = float(rho_err)
    return out
