"""Representations σ of M on E and the Berezin calculus on the orbit o(ξ₂).

Two backends share the interface ``dimE``, ``dim_m``, ``xi2`` (𝔪-coordinates),
``sigma(m)``, ``dsigma(x)``, ``beta_m(x, y)``, ``bracket_m(x, y)``,
``coherent_state(phi)`` and ``sample_group(rng)``:

* :class:`CharacterFiber`: a character of the finite group M of diagonal
  ±1 matrices (the sl(n, R) case, where 𝔪 = 0 and the orbit is a point);
* :class:`SpinFiber`: the spin-j representation of SU(2) with 𝔪 = so(3),
  usable on its own.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import RankDeficient

_PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class CharacterFiber:
    """χ(m) = Π_{i ∈ S} m_ii on diagonal sign matrices."""

    indices: tuple = ()
    kind: str = "finite-character"

    dimE = 1
    dim_m = 0

    @property
    def xi2(self) -> np.ndarray:
        return np.zeros(0)

    def sigma(self, m) -> np.ndarray:
        d = np.diag(np.asarray(m, dtype=float))
        return np.array([[np.prod(np.sign(d[list(self.indices)])) if self.indices else 1.0]], dtype=complex)

    def dsigma(self, x) -> np.ndarray:
        return np.zeros((1, 1), dtype=complex)

    def beta_m(self, x, y) -> float:
        return 0.0

    def bracket_m(self, x, y) -> np.ndarray:
        return np.zeros(0)

    def adjoint_m(self, m, x) -> np.ndarray:
        return np.zeros(0)

    def coherent_state(self, phi) -> np.ndarray:
        return np.ones(1, dtype=complex)

    def sample_group(self, rng, size: int = 3):
        d = rng.choice([-1.0, 1.0], size=size)
        d[-1] = np.prod(d[:-1])
        return np.diag(d)

    def group_elements(self, size: int):
        """All diagonal ±1 matrices of the given size with det 1."""
        out = []
        for bits in range(2 ** (size - 1)):
            d = [(-1.0) ** ((bits >> i) & 1) for i in range(size - 1)]
            d.append(float(np.prod(d)))
            out.append(np.diag(d))
        return out

    def describe(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices)}


def trivial_character() -> CharacterFiber:
    return CharacterFiber(())


def sign_character() -> CharacterFiber:
    return CharacterFiber((0,), kind="sign-character")


def spin_matrices(j: float):
    """Hermitian J_x, J_y, J_z in the basis |j, j⟩, …, |j, -j⟩."""
    dim = int(round(2 * j)) + 1
    m = j - np.arange(dim)
    Jz = np.diag(m).astype(complex)
    Jp = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        Jp[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    Jx = 0.5 * (Jp + Jp.conj().T)
    Jy = -0.5j * (Jp - Jp.conj().T)
    return np.array([Jx, Jy, Jz])


def su2_rotation_vector(u) -> np.ndarray:
    """w ∈ R³ with u = exp(-i w·σ/2), ‖w‖ ∈ [0, 2π]."""
    u = np.asarray(u, dtype=complex)
    c = np.clip(0.5 * np.real(np.trace(u)), -1.0, 1.0)
    angle = 2.0 * np.arccos(c)
    s = np.array([0.5 * np.imag(np.trace(u @ p)) for p in _PAULI])  # = -sin(angle/2) n
    sn = np.linalg.norm(s)
    if sn < 1e-15:
        if c > 0:
            return np.zeros(3)
        return np.array([2 * np.pi, 0.0, 0.0])
    return -angle * s / sn


def su2_from_rotation_vector(w) -> np.ndarray:
    return expm(-0.5j * np.tensordot(np.asarray(w, dtype=float), _PAULI, axes=1))


@dataclass(frozen=True)
class SpinFiber:
    """Spin-j representation with 𝔪 = so(3), [L_a, L_b] = ε_abc L_c.

    dσ(L_a) = -i J_a and β_m(x, y) = -κ x·y.  The base point
    ξ₂ = (0, 0, -j/κ) has highest weight j in the L_3 direction and the
    highest-weight vector |j, -j⟩.
    """

    j: float
    kappa: float = 6.0
    kind: str = "spin-j"
    _J: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.j <= 0 or abs(2 * self.j - round(2 * self.j)) > 1e-12:
            raise ValueError(f"spin must be a positive half-integer, got {self.j!r}")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        object.__setattr__(self, "_J", spin_matrices(self.j))

    @property
    def dimE(self) -> int:
        return self._J.shape[1]

    dim_m = 3

    @property
    def xi2(self) -> np.ndarray:
        return np.array([0.0, 0.0, -self.j / self.kappa])

    def dsigma(self, x) -> np.ndarray:
        return -1j * np.tensordot(np.asarray(x, dtype=float), self._J, axes=1)

    def sigma(self, u) -> np.ndarray:
        return expm(self.dsigma(su2_rotation_vector(u)))

    def beta_m(self, x, y) -> float:
        return -self.kappa * float(np.dot(x, y))

    def bracket_m(self, x, y) -> np.ndarray:
        return np.cross(x, y)

    def adjoint_matrix(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        return np.array(
            [[0.5 * np.real(np.trace(_PAULI[a] @ u @ _PAULI[b] @ u.conj().T)) for b in range(3)] for a in range(3)]
        )

    def adjoint_m(self, u, x) -> np.ndarray:
        return self.adjoint_matrix(u) @ np.asarray(x, dtype=float)

    def rotation_to(self, phi) -> np.ndarray:
        """An SU(2) element u with Ad(u)ξ₂ = φ."""
        phi = np.asarray(phi, dtype=float)
        d0 = np.array([0.0, 0.0, -1.0])
        d1 = phi / np.linalg.norm(phi)
        axis = np.cross(d0, d1)
        s = np.linalg.norm(axis)
        c = float(np.dot(d0, d1))
        if s < 1e-14:
            w = np.zeros(3) if c > 0 else np.array([np.pi, 0.0, 0.0])
        else:
            w = np.arctan2(s, c) * axis / s
        return su2_from_rotation_vector(w)

    def coherent_state(self, phi) -> np.ndarray:
        hw = np.zeros(self.dimE, dtype=complex)
        hw[-1] = 1.0
        return self.sigma(self.rotation_to(phi)) @ hw

    def sample_group(self, rng, size=None):
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
        return np.array([[q[0] + 1j * q[3], q[2] + 1j * q[1]], [-q[2] + 1j * q[1], q[0] - 1j * q[3]]])

    def describe(self) -> dict:
        return {"kind": self.kind, "j": self.j, "kappa": self.kappa}


def orbit_sample(rep, count: int, seed: int) -> list:
    """Deterministic points Ad(m)ξ₂ with m drawn from M."""
    rng = np.random.default_rng(seed)
    if rep.dim_m == 0:
        return [np.zeros(0) for _ in range(count)]
    return [rep.adjoint_m(rep.sample_group(rng), rep.xi2) for _ in range(count)]


def berezin_symbol(rep, B, phi) -> complex:
    """Covariant symbol ⟨v_φ, B v_φ⟩ / ⟨v_φ, v_φ⟩."""
    B = np.asarray(B, dtype=complex)
    if rep.dim_m == 0:
        return complex(B.reshape(-1)[0])
    v = rep.coherent_state(phi)
    return complex(np.vdot(v, B @ v) / np.vdot(v, v))


def berezin_reconstruct(rep, samples, cond_max: float = 1e10) -> np.ndarray:
    """Least-squares B with s(B)(φ_i) = value_i."""
    d = rep.dimE
    rows, vals = [], []
    for phi, value in samples:
        v = rep.coherent_state(phi)
        rows.append(np.outer(v.conj(), v).reshape(-1) / np.vdot(v, v).real)
        vals.append(value)
    A = np.array(rows, dtype=complex).reshape(-1, d * d)
    b = np.array(vals, dtype=complex)
    if A.shape[0] < d * d:
        raise RankDeficient(f"need at least {d * d} samples, got {A.shape[0]}")
    cond = np.linalg.cond(A.conj().T @ A)
    if not np.isfinite(cond) or cond > cond_max:
        raise RankDeficient(f"sampling Gram matrix condition number {cond:.3g} exceeds {cond_max:.0e}")
    x = np.linalg.lstsq(A, b, rcond=None)[0]
    return x.reshape(d, d)


def check_prop_4_1(rep, n_points: int = 20, n_ops: int = 10, seed: int = 0) -> dict:
    """Residuals of the four listed Berezin-symbol properties."""
    rng = np.random.default_rng(seed)
    d = rep.dimE
    pts = orbit_sample(rep, n_points, seed)
    ops = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(n_ops)]
    out = {"adjoint": 0.0, "equivariance": 0.0, "dsigma": 0.0, "reconstruction": 0.0, "hw_compat": 0.0}
    for phi in pts:
        for B in ops:
            out["adjoint"] = max(out["adjoint"], abs(berezin_symbol(rep, B.conj().T, phi) - np.conj(berezin_symbol(rep, B, phi))))
            m = rep.sample_group(rng, 3)
            S = rep.sigma(m)
            lhs = berezin_symbol(rep, B, rep.adjoint_m(m, phi) if rep.dim_m else phi)
            rhs = berezin_symbol(rep, np.linalg.inv(S) @ B @ S, phi)
            out["equivariance"] = max(out["equivariance"], abs(lhs - rhs))
        for a in range(rep.dim_m):
            X = np.eye(rep.dim_m)[a]
            val = berezin_symbol(rep, rep.dsigma(X), phi)
            out["dsigma"] = max(out["dsigma"], abs(val - 1j * rep.beta_m(phi, X)))
    # injectivity witness: recover B from its symbol on 2·dimE² generic points
    recon_pts = orbit_sample(rep, max(2 * d * d, 1), seed + 1)
    for B in ops[:3]:
        B = B + B.conj().T
        samples = [(p, berezin_symbol(rep, B, p)) for p in recon_pts]
        out["reconstruction"] = max(out["reconstruction"], float(np.max(np.abs(berezin_reconstruct(rep, samples) - B))))
    if rep.dim_m:
        T = np.array([0.0, 0.0, 1.0])  # torus direction L_3
        top = np.max(np.linalg.eigvalsh(-1j * rep.dsigma(T)))
        out["hw_compat"] = abs(top - rep.beta_m(rep.xi2, T))
        out["orbit_norm"] = max(abs(rep.beta_m(p, p) - rep.beta_m(rep.xi2, rep.xi2)) for p in pts)
    return out
