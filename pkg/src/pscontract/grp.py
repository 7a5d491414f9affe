"""Group-level computations for matrix realizations.

Group elements are plain invertible matrices.  Points of N̄ are stored by
their log-coordinates Y in the orthonormal basis (E_i) of n̄, so that
``y = exp(Σ Y_i E_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.special import bernoulli

from .errors import NotInBigCell
from .liealg import RealizedAlgebra

MINOR_TOL = 1e-10


def expm_ss(M: np.ndarray, order: int = 18) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Taylor core."""
    M = np.asarray(M, dtype=float)
    norm = np.linalg.norm(M, 1)
    s = max(0, int(np.ceil(np.log2(norm / 0.25))) if norm > 0.25 else 0)
    A = M / 2.0**s
    term = np.eye(M.shape[0])
    out = term.copy()
    for k in range(1, order + 1):
        term = term @ A / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def exp_group(alg: RealizedAlgebra, x) -> np.ndarray:
    return expm_ss(alg.matrix(x))


def _nilpotent_exp(N: np.ndarray) -> np.ndarray:
    out = np.eye(N.shape[0])
    term = out.copy()
    for k in range(1, N.shape[0]):
        term = term @ N / k
        out = out + term
    return out


def _unipotent_log(u: np.ndarray) -> np.ndarray:
    N = u - np.eye(u.shape[0])
    out = np.zeros_like(N)
    term = np.eye(u.shape[0])
    for k in range(1, u.shape[0]):
        term = term @ N
        out = out + ((-1) ** (k + 1) / k) * term
    return out


def nbar_matrix(alg: RealizedAlgebra, Y) -> np.ndarray:
    """The matrix exp(Y) for log-coordinates Y on (E_i)."""
    return _nilpotent_exp(alg.matrix(alg.from_nbar(Y)))


def log_nbar(alg: RealizedAlgebra, y: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Log-coordinates of a unipotent element of N̄ (finite series)."""
    y = np.asarray(y, dtype=float)
    L = _unipotent_log(y)
    x = alg.coords(L)
    resid = np.linalg.norm(alg.matrix(x) - L) + np.linalg.norm(x - alg.proj("nbar") @ x)
    if resid > tol * max(1.0, np.linalg.norm(L)) or not np.allclose(np.diag(y), 1.0, atol=tol):
        raise ValueError(f"matrix is not a unipotent element of N̄ (residual {resid:.3g})")
    return alg.to_nbar(x)


def nbar_mul(alg: RealizedAlgebra, Y1, Y2) -> np.ndarray:
    return log_nbar(alg, nbar_matrix(alg, Y1) @ nbar_matrix(alg, Y2))


def nbar_inv(Y) -> np.ndarray:
    return -np.asarray(Y, dtype=float)


def nbar_ad(alg: RealizedAlgebra, Y) -> np.ndarray:
    """Matrix of ad Y on n̄ in the (E_i) coordinates."""
    return np.einsum("i,ijk->kj", np.asarray(Y, float), alg.nbar_structure)


_BERNOULLI = bernoulli(12)


def nbar_left_jacobian(alg: RealizedAlgebra, Y) -> np.ndarray:
    """J(Y) with d/dt log(exp Y exp tW)|₀ = J(Y) W, i.e. J = ψ(ad Y), ψ(x) = x/(1-e^{-x})."""
    A = -nbar_ad(alg, Y)
    n = A.shape[0]
    out = np.zeros((n, n))
    term = np.eye(n)
    for k in range(n + 1):
        out = out + (_BERNOULLI[k] / factorial(k)) * term
        term = term @ A
    return out


def adjoint(alg: RealizedAlgebra, g: np.ndarray, x) -> np.ndarray:
    """Coordinates of g X g⁻¹."""
    return alg.coords(g @ alg.matrix(x) @ np.linalg.inv(g))


def adjoint_matrix(alg: RealizedAlgebra, g: np.ndarray) -> np.ndarray:
    ginv = np.linalg.inv(g)
    return np.column_stack([alg.coords(g @ b @ ginv) for b in alg.basis])


@dataclass(frozen=True)
class IwasawaFactors:
    ktilde: np.ndarray
    atilde: np.ndarray
    ntilde: np.ndarray
    log_atilde: np.ndarray  # g-coordinates of log ã, an element of a


@dataclass(frozen=True)
class BruhatFactors:
    nbar: np.ndarray  # log-coordinates on (E_i)
    m: np.ndarray
    a: np.ndarray
    n: np.ndarray
    log_a: np.ndarray  # g-coordinates of log a

    def nbar_matrix(self, alg: RealizedAlgebra) -> np.ndarray:
        return nbar_matrix(alg, self.nbar)


def _check_square(g):
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {g.shape}")
    return g


def iwasawa(alg: RealizedAlgebra, g) -> IwasawaFactors:
    """g = k̃ ã ñ via QR with positive diagonal on R."""
    g = _check_square(g)
    if abs(np.linalg.det(g)) < 1e-12:
        raise ValueError("numerically singular matrix")
    Q, R = np.linalg.qr(g)
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    Q = Q * s
    R = s[:, None] * R
    d = np.diag(R)
    a = np.diag(d)
    n = R / d[:, None]
    return IwasawaFactors(Q, a, n, alg.coords(np.diag(np.log(d))))


def bruhat(alg: RealizedAlgebra, g) -> BruhatFactors:
    """g = n̄ m a n via LU without pivoting (Doolittle)."""
    g = _check_square(g)
    N = g.shape[0]
    L = np.eye(N)
    U = g.copy()
    minor = 1.0
    for j in range(N):
        minor *= U[j, j]
        if abs(minor) < MINOR_TOL:
            raise NotInBigCell(f"leading principal minor {j + 1} is {minor:.3g}")
        for i in range(j + 1, N):
            L[i, j] = U[i, j] / U[j, j]
            U[i, :] -= L[i, j] * U[j, :]
            U[i, j] = 0.0
    d = np.diag(U)
    m = np.diag(np.sign(d))
    a = np.diag(np.abs(d))
    n = np.diag(1.0 / d) @ U
    return BruhatFactors(log_nbar(alg, L), m, a, n, alg.coords(np.diag(np.log(np.abs(d)))))


def polar(alg: RealizedAlgebra, h) -> tuple:
    """h = exp(v) k with v ∈ V, k ∈ K; returns (v coordinates, k)."""
    h = _check_square(h)
    w, U = np.linalg.eigh(h @ h.T)
    logp = U @ np.diag(0.5 * np.log(w)) @ U.T
    k = U @ np.diag(w**-0.5) @ U.T @ h
    return alg.coords(logp), k


def dot_action(alg: RealizedAlgebra, k, Y) -> np.ndarray:
    """k·y = n̄(k y), in log-coordinates."""
    return bruhat(alg, np.asarray(k) @ nbar_matrix(alg, Y)).nbar


def lemma21_derivatives(alg: RealizedAlgebra, x, Y) -> dict:
    """Closed-form first derivatives of the factor curves along exp(tX)y.

    ``dnbar`` is Y₀ = p_n̄(Ad(y⁻¹)X) in (E_i) coordinates: the curve
    n̄(exp(tX)y) agrees to first order with y·exp(tY₀).  ``dnbar_log`` is
    the corresponding velocity of log-coordinates.
    """
    x = np.asarray(x, dtype=float)
    y = nbar_matrix(alg, Y)
    W = adjoint(alg, np.linalg.inv(y), x)
    kt = iwasawa(alg, y).ktilde
    Y0 = alg.to_nbar(W)
    return {
        "da": alg.proj("a") @ W,
        "dm": alg.proj("m") @ W,
        "dnbar": Y0,
        "dnbar_log": nbar_left_jacobian(alg, Y) @ Y0,
        "datilde": alg.proj("a_tilde") @ adjoint(alg, kt.T, x),
    }


def random_group_element(alg: RealizedAlgebra, rng, scale: float = 0.5) -> np.ndarray:
    return exp_group(alg, alg.random_element(rng, scale))


def random_k(alg: RealizedAlgebra, rng, scale: float = 1.0) -> np.ndarray:
    return exp_group(alg, alg.random_in("k", rng, scale))


def random_nbar(alg: RealizedAlgebra, rng, scale: float = 0.5) -> np.ndarray:
    return scale * rng.standard_normal(alg.dim_nbar)
