"""Worked models: the flip on C[0,1], a parity-twisted Schrödinger pair on a
symmetric grid, and a two-level Hamiltonian with an eigenvalue trichotomy."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from kreinlab.cmatrix import adjoint, eig2x2, frobenius_norm, _kernel_vector
from kreinlab.fock import BOSE, FERMI, FockBasis, FockSpec
from kreinlab.krein import KreinTriplet, dagger_adjoint, krein_form, vector_norm_class
from kreinlab.report import CheckReport

COMBOS = {"bb": (BOSE, BOSE), "bf": (BOSE, FERMI), "fb": (FERMI, BOSE), "ff": (FERMI, FERMI)}
TIE_BAND = 1e-12
STAR_WITNESS_MIN_G = 0.05


class GridError(ValueError):
    pass


# -- flip on C[0,1] ----------------------------------------------------------

def flip_grid(n: int) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise GridError(f"need an odd number of points >= 3 so that 1/2 is on the grid, got {n}")
    return np.arange(n) / (n - 1)


def flip_matrix(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)[::-1].copy()


def flip_dagger(f: Callable) -> Callable:
    """``f^dag(x) = conj(f(1 - x))``."""
    return lambda x: np.conj(f(1.0 - np.asarray(x)))


@dataclass
class FlipRep:
    x: np.ndarray
    eta: np.ndarray

    @property
    def triplet(self) -> KreinTriplet:
        return KreinTriplet(self.eta)

    def mult(self, f) -> np.ndarray:
        """Multiplication operator from a callable or from samples on the grid."""
        vals = f(self.x) if callable(f) else f
        vals = np.broadcast_to(np.asarray(vals, dtype=np.complex128), self.x.shape)
        return np.diag(vals)


_FLIP_SAMPLES = {
    "one": lambda x: np.ones_like(x),
    "x": lambda x: x,
    "witness": lambda x: 1 - 2 * x,
    "phase": lambda x: np.exp(2j * np.pi * x),
    "mixed": lambda x: x**2 + 1j * np.sin(3 * x),
}


def c01_flip_rep(n: int, tol: float = 1e-13) -> tuple[np.ndarray, Callable, CheckReport]:
    x = flip_grid(n)
    rep = FlipRep(x, flip_matrix(n))
    t = rep.triplet
    report = CheckReport("c01", {"points": n})
    worst = 0.0
    for f in _FLIP_SAMPLES.values():
        lhs = rep.mult(flip_dagger(f))
        worst = max(worst, frobenius_norm(lhs - dagger_adjoint(rep.mult(f), t)))
    report.add("c01_dagger_is_krein_adjoint", worst, tol)
    f1 = _FLIP_SAMPLES["witness"]
    prod = np.real(flip_dagger(f1)(x) * f1(x))
    report.add("c01_witness_nonpositive", max(0.0, float(prod.max())), tol)
    report.add("c01_witness_at_zero_is_minus_one", abs(prod[0] + 1), tol)
    report.add("c01_witness_at_half_is_zero", abs(prod[(n - 1) // 2]), tol)
    report.classification = "indefinite"
    return rep.eta, rep.mult, report


# -- Schrödinger pair on a symmetric grid ------------------------------------

@dataclass(frozen=True)
class GridSpec:
    points: int
    half_width: float

    def __post_init__(self):
        if self.points < 3 or self.points % 2 == 0:
            raise GridError(f"grid needs an odd point count >= 3, got {self.points}")
        if not self.half_width > 0:
            raise GridError("half_width must be positive")

    @property
    def h(self) -> float:
        return 2 * self.half_width / (self.points - 1)

    @property
    def q(self) -> np.ndarray:
        k = np.arange(self.points)
        return self.h * (k - (self.points - 1) / 2)


@dataclass
class PauliOps:
    p: np.ndarray
    q: np.ndarray
    a: np.ndarray
    a_star: np.ndarray
    a_dagger: np.ndarray
    R: np.ndarray
    D: np.ndarray


def central_difference(n: int, h: float) -> np.ndarray:
    """Antisymmetric central difference; neighbours off the grid are zero."""
    D = np.zeros((n, n), dtype=np.complex128)
    i = np.arange(n - 1)
    D[i, i + 1] = 1 / (2 * h)
    D[i + 1, i] = -1 / (2 * h)
    return D


def pauli_ops(grid: GridSpec) -> PauliOps:
    n = grid.points
    D = central_difference(n, grid.h)
    p = -1j * D
    q = np.diag(grid.q).astype(np.complex128)
    R = np.eye(n, dtype=np.complex128)[::-1].copy()
    a = (p - 1j * q) / np.sqrt(2)
    t = KreinTriplet(R)
    return PauliOps(p, q, a, adjoint(a), dagger_adjoint(a, t), R, D)


def gaussian_defect(ops: PauliOps, grid: GridSpec) -> float:
    phi = np.exp(-grid.q**2 / 2).astype(np.complex128)
    comm = ops.a @ ops.a_dagger - ops.a_dagger @ ops.a
    return float(np.linalg.norm(comm @ phi + phi) / np.linalg.norm(phi))


def pauli_rep(grid: GridSpec, tol: float = 1e-13, defect_tol: float = 1e-2) -> tuple[PauliOps, CheckReport]:
    ops = pauli_ops(grid)
    t = KreinTriplet(ops.R)
    R = ops.R
    report = CheckReport("pauli", {"points": grid.points, "half_width": grid.half_width, "h": grid.h})
    report.add("pauli_parity_anticommutes_D", frobenius_norm(R @ ops.D @ R + ops.D), tol)
    report.add("pauli_parity_anticommutes_q", frobenius_norm(R @ ops.q @ R + ops.q), tol)
    report.add("pauli_a_dagger_is_minus_a_star", frobenius_norm(ops.a_dagger + ops.a_star), tol)
    report.add("pauli_p_dagger_is_minus_p", frobenius_norm(dagger_adjoint(ops.p, t) + ops.p), tol)
    report.add("pauli_q_dagger_is_minus_q", frobenius_norm(dagger_adjoint(ops.q, t) + ops.q), tol)
    report.add("pauli_gaussian_commutator_defect", gaussian_defect(ops, grid), defect_tol)
    report.notes.append("commutator defect is measured on exp(-q^2/2); the operator-norm defect is O(1) at the boundary")
    return ops, report


# -- two-level model ---------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    m_A: float
    m_B: float
    g: complex
    combo: str = "ff"
    cutoff: int = 4

    def __post_init__(self):
        if not (self.m_A > 0 and self.m_B > 0):
            raise ValueError("masses must be positive")
        if self.combo not in COMBOS:
            raise ValueError(f"combo must be one of {sorted(COMBOS)}, got {self.combo!r}")
        if BOSE in COMBOS[self.combo] and self.cutoff < 2:
            raise ValueError("bosonic factors need cutoff >= 2")
        object.__setattr__(self, "g", complex(self.g))


def two_level_matrix(p: ModelParams) -> np.ndarray:
    return np.array([[p.m_A, -p.g], [np.conj(p.g), p.m_B]], dtype=np.complex128)


def discriminant(p: ModelParams) -> float:
    return (p.m_A - p.m_B) ** 2 - 4 * abs(p.g) ** 2


@dataclass
class SpectrumReport:
    classification: str
    eigenvalues: tuple[complex, complex]
    krein_norms: tuple[str, ...]
    discriminant: float
    eigenvectors: list[np.ndarray] = field(default_factory=list, repr=False)
    defective: bool = False

    @property
    def eigenvector_norms(self) -> tuple[str, ...]:
        return tuple(vector_norm_class(v, ETA_V) for v in self.eigenvectors)

    def norm_columns(self) -> tuple[str, str]:
        """Two CSV columns; ``n/a`` where no class is assigned."""
        cols = list(self.krein_norms) + ["n/a"] * (2 - len(self.krein_norms))
        return cols[0], cols[1]


ETA_V = KreinTriplet.from_signs([1, -1])


def classify_spectrum(p: ModelParams) -> SpectrumReport:
    M = two_level_matrix(p)
    disc = discriminant(p)
    if abs(disc) <= TIE_BAND * (p.m_A + p.m_B) ** 2:
        lam = (p.m_A + p.m_B) / 2 + 0j
        shifted = M - lam * np.eye(2)
        if frobenius_norm(shifted) <= TIE_BAND * (p.m_A + p.m_B):
            # Scalar restriction (g = 0, m_A = m_B): not defective.
            vecs = [np.array([1, 0], dtype=np.complex128), np.array([0, 1], dtype=np.complex128)]
            norms = tuple(vector_norm_class(v, ETA_V) for v in vecs)
            return SpectrumReport("one_real_neutral", (lam, lam), norms, disc, vecs, False)
        v = _kernel_vector(shifted)
        return SpectrumReport("one_real_neutral", (lam, lam), (vector_norm_class(v, ETA_V),), disc, [v], True)
    e = eig2x2(M, tol=0.0)
    vecs = list(e.eigenvectors)
    if disc > 0:
        # Characteristic polynomial has real coefficients: drop roundoff imaginary parts.
        lams = tuple(complex(z.real, 0.0) for z in e.eigenvalues)
        norms = tuple(vector_norm_class(v, ETA_V) for v in vecs)
        return SpectrumReport("two_real", lams, norms, disc, vecs)
    # Complex pair: no norm classes are assigned. The computed eigenvector
    # classes (always neutral here) stay available on eigenvector_norms.
    # Real characteristic polynomial: the pair is conjugate, impose it exactly.
    lam = e.eigenvalues[0]
    rep = SpectrumReport("complex_pair", (lam, lam.conjugate()), (), disc, vecs)
    return rep


def quadratic_roots(m_A: float, m_B: float, g_abs: float) -> tuple[complex, complex]:
    """Roots of ``l^2 - (m_A+m_B) l + m_A m_B + |g|^2``; larger real/imag first."""
    tr = m_A + m_B
    s = cmath.sqrt((m_A - m_B) ** 2 - 4 * g_abs**2)
    return (tr + s) / 2, (tr - s) / 2


@dataclass
class FullModel:
    H: np.ndarray
    eta: np.ndarray
    a_A: np.ndarray
    a_B: np.ndarray
    omega: np.ndarray


def _factor(statistics: str, sign: int, cutoff: int) -> FockBasis:
    return FockBasis(FockSpec.from_signs(statistics, [sign], cutoff if statistics == BOSE else 1))


def build_full_model(p: ModelParams) -> FullModel:
    sa, sb = COMBOS[p.combo]
    A = _factor(sa, 1, p.cutoff)
    B = _factor(sb, -1, p.cutoff)
    ia = np.eye(A.dim)
    ib = np.eye(B.dim)
    # Plain tensor placement: the two factors commute, even for fermions.
    a_A = np.kron(A.mode_annihilators[0], ib)
    a_B = np.kron(ia, B.mode_annihilators[0])
    eta = np.kron(A.gamma, B.gamma)
    t = KreinTriplet(eta)
    dA = dagger_adjoint(a_A, t)
    dB = dagger_adjoint(a_B, t)
    H = p.m_A * dA @ a_A - p.m_B * dB @ a_B + p.g * dA @ a_B + np.conj(p.g) * dB @ a_A
    omega = np.kron(A.vacuum(), B.vacuum())
    return FullModel(H, eta, a_A, a_B, omega)


def full_model(p: ModelParams, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray, CheckReport]:
    m = build_full_model(p)
    t = KreinTriplet(m.eta)
    H = m.H
    report = CheckReport("model", {"m_a": p.m_A, "m_b": p.m_B, "g_re": p.g.real, "g_im": p.g.imag,
                                   "combo": p.combo, "cutoff": p.cutoff, "dim": H.shape[0]})
    uA = dagger_adjoint(m.a_A, t) @ m.omega
    uB = dagger_adjoint(m.a_B, t) @ m.omega
    report.add("model_negative_norm_one_particle", abs(krein_form(uB, uB, t) + 1), 0.0)
    report.add("model_positive_norm_one_particle", abs(krein_form(uA, uA, t) - 1), 0.0)
    report.add("model_H_dagger_self_adjoint", frobenius_norm(dagger_adjoint(H, t) - H), tol)
    U = np.column_stack([uA, uB])
    restr = np.linalg.lstsq(U, H @ U, rcond=None)[0]
    report.add("model_V_invariant", frobenius_norm(H @ U - U @ restr), tol)
    report.add("model_restriction_matches_two_level", frobenius_norm(restr - two_level_matrix(p)), tol)
    sA, sB = adjoint(m.a_A), adjoint(m.a_B)
    rewritten = (p.m_A * sA @ m.a_A + p.m_B * sB @ m.a_B + p.g * sA @ m.a_B
                 - np.conj(p.g) * sB @ m.a_A)
    report.add("model_rewritten_form", frobenius_norm(rewritten - H), tol)
    star_gap = frobenius_norm(adjoint(H) - H)
    if abs(p.g) >= STAR_WITNESS_MIN_G:
        # Witness that H is not *-self-adjoint: residual is how far the gap falls short of 0.1.
        # The gap is at least 2*sqrt(2)|g| for every combo, so |g| >= 0.05 clears it.
        report.add("model_H_not_star_self_adjoint", max(0.0, 0.1 - star_gap), 0.0)
    report.notes.append(f"||H^* - H||_F = {star_gap:.17g}")
    s = classify_spectrum(p)
    report.classification = s.classification
    report.eigenvalues = list(s.eigenvalues)
    report.notes.append("krein_norms: " + ",".join(s.norm_columns()))
    report.notes.append(f"discriminant: {s.discriminant:.17g}")
    if s.defective:
        report.notes.append("restriction is defective: single eigenvector")
    return H, m.eta, report


def restriction_matrix(p: ModelParams) -> np.ndarray:
    """Matrix of the full H on ``(a_A^dag Omega, a_B^dag Omega)``."""
    m = build_full_model(p)
    t = KreinTriplet(m.eta)
    U = np.column_stack([dagger_adjoint(m.a_A, t) @ m.omega, dagger_adjoint(m.a_B, t) @ m.omega])
    return np.linalg.lstsq(U, m.H @ U, rcond=None)[0]
