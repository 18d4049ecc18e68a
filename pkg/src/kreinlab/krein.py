"""Krein triplets, indefinite forms and covariant representations.

A Krein triplet is a finite-dimensional Hilbert space together with a
self-adjoint unitary ``eta`` (the fundamental symmetry). The indefinite form
is ``(v|w) = <v|eta w>``, conjugate-linear in the first slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from kreinlab.cmatrix import ShapeError, adjoint, as_cmatrix, check_square, frobenius_norm

SYMMETRY_TOL = 1e-12
NEUTRAL_TOL = 1e-10


class InvalidSymmetryError(ValueError):
    """The given matrix is not a self-adjoint unitary."""


class ContractError(ValueError):
    """An operation was called outside its documented preconditions."""


@dataclass(frozen=True)
class KreinTriplet:
    eta: np.ndarray

    def __post_init__(self):
        eta = check_square(self.eta, "eta")
        n = eta.shape[0]
        if frobenius_norm(eta - adjoint(eta)) > SYMMETRY_TOL * max(1.0, np.sqrt(n)):
            raise InvalidSymmetryError("eta is not self-adjoint")
        if frobenius_norm(eta @ eta - np.eye(n)) > SYMMETRY_TOL * max(1.0, np.sqrt(n)):
            raise InvalidSymmetryError("eta is not unitary (eta @ eta != I)")
        eta = eta.copy()
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)

    @property
    def dim(self) -> int:
        return self.eta.shape[0]

    @classmethod
    def from_signs(cls, signs) -> "KreinTriplet":
        return cls(np.diag(np.asarray(signs, dtype=np.complex128)))


@dataclass(frozen=True)
class Representation:
    """Generator matrices on a Krein triplet, optionally with the images of
    the generators under the Z2 automorphism."""

    space: KreinTriplet
    generators: Mapping[str, np.ndarray]
    alpha_images: Optional[Mapping[str, np.ndarray]] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = self.space.dim
        gens = {k: as_cmatrix(v) for k, v in self.generators.items()}
        for k, v in gens.items():
            if v.shape != (n, n):
                raise ShapeError(f"generator {k!r} has shape {v.shape}, space has dim {n}")
        object.__setattr__(self, "generators", gens)
        if self.alpha_images is not None:
            alpha = {k: as_cmatrix(v) for k, v in self.alpha_images.items()}
            if set(alpha) != set(gens):
                raise ContractError("alpha_images must cover exactly the generator labels")
            for k, v in alpha.items():
                if v.shape != (n, n):
                    raise ShapeError(f"alpha image {k!r} has shape {v.shape}, space has dim {n}")
            object.__setattr__(self, "alpha_images", alpha)

    @property
    def dim(self) -> int:
        return self.space.dim


def _vector(v, n: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.shape[0] != n:
        raise ShapeError(f"vector of length {v.shape[0]} does not match dimension {n}")
    return v


def krein_form(v, w, t: KreinTriplet) -> complex:
    """``(v|w) = <v|eta w>``."""
    v = _vector(v, t.dim)
    w = _vector(w, t.dim)
    return complex(np.vdot(v, t.eta @ w))


def dagger_adjoint(T, t: KreinTriplet) -> np.ndarray:
    """Adjoint with respect to the indefinite form: ``eta T^* eta``."""
    T = as_cmatrix(T)
    if T.shape != (t.dim, t.dim):
        raise ShapeError(f"operator shape {T.shape} does not match dimension {t.dim}")
    return t.eta @ adjoint(T) @ t.eta


@dataclass(frozen=True)
class FundamentalDecomposition:
    E_plus: np.ndarray
    E_minus: np.ndarray
    signature: tuple[int, int]


def fundamental_decomposition(t: KreinTriplet) -> FundamentalDecomposition:
    n = t.dim
    eye = np.eye(n, dtype=np.complex128)
    e_plus = (eye + t.eta) / 2
    e_minus = (eye - t.eta) / 2
    counts = []
    for e in (e_plus, e_minus):
        tr = np.trace(e).real
        k = int(round(tr))
        if abs(tr - k) > 1e-6:
            raise InvalidSymmetryError(f"projection trace {tr} is not an integer")
        counts.append(k)
    return FundamentalDecomposition(e_plus, e_minus, (counts[0], counts[1]))


def signature(eta) -> tuple[int, int]:
    return fundamental_decomposition(KreinTriplet(as_cmatrix(eta))).signature


def vector_norm_class(v, t: KreinTriplet, tol: float = NEUTRAL_TOL) -> str:
    """Classify ``v`` as ``"positive"``, ``"negative"`` or ``"neutral"``.

    Neutral means ``|(v|v)| <= tol * <v|v>``.
    """
    v = _vector(v, t.dim)
    hilbert = float(np.vdot(v, v).real)
    if hilbert == 0.0:
        raise ValueError("the zero vector has no norm class")
    q = krein_form(v, v, t).real
    if abs(q) <= tol * hilbert:
        return "neutral"
    return "positive" if q > 0 else "negative"


def covariance_residual(r: Representation) -> float:
    """max over generators of ``||pi(alpha(g)) - eta pi(g) eta||_F``."""
    if r.alpha_images is None:
        raise ContractError("representation carries no alpha_images")
    eta = r.space.eta
    return max(
        (frobenius_norm(r.alpha_images[k] - eta @ g @ eta) for k, g in r.generators.items()),
        default=0.0,
    )


def grading_residual(r: Representation, parts: Mapping[str, str]) -> float:
    """How far each generator is from preserving (even) or swapping (odd)
    the eigenspaces of ``eta``; the max over the listed generators."""
    fd = fundamental_decomposition(r.space)
    ep, em = fd.E_plus, fd.E_minus
    worst = 0.0
    for label, parity in parts.items():
        if label not in r.generators:
            raise ContractError(f"unknown generator label {label!r}")
        g = r.generators[label]
        if parity == "even":
            res = frobenius_norm(em @ g @ ep) + frobenius_norm(ep @ g @ em)
        elif parity == "odd":
            res = frobenius_norm(ep @ g @ ep) + frobenius_norm(em @ g @ em)
        else:
            raise ContractError(f"parity must be 'even' or 'odd', got {parity!r}")
        worst = max(worst, res)
    return worst


def double_representation(gens: Mapping[str, np.ndarray], alpha_gens: Mapping[str, np.ndarray]) -> Representation:
    """Z2 doubling: ``pi~(g) = pi(g) (+) pi(alpha(g))`` on ``H (x) C^2`` with
    ``eta`` swapping the two copies.

    Basis ordering is ``v (x) e_i`` at index ``2*k + i``, so the two copies
    interleave; ``eta`` is ``I_n (x) sigma_1``.
    """
    gens = {k: check_square(v, f"generator {k!r}") for k, v in gens.items()}
    alpha_gens = {k: check_square(v, f"alpha image {k!r}") for k, v in alpha_gens.items()}
    if set(gens) != set(alpha_gens):
        raise ContractError("alpha_gens must cover exactly the generator labels")
    dims = {v.shape[0] for v in gens.values()} | {v.shape[0] for v in alpha_gens.values()}
    if len(dims) != 1:
        raise ShapeError(f"generator family has mixed dimensions {sorted(dims)}")
    (n,) = dims
    e0 = np.diag([1.0, 0.0]).astype(np.complex128)
    e1 = np.diag([0.0, 1.0]).astype(np.complex128)
    swap = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    eta = np.kron(np.eye(n), swap)
    doubled = {k: np.kron(gens[k], e0) + np.kron(alpha_gens[k], e1) for k in gens}
    swapped = {k: np.kron(alpha_gens[k], e0) + np.kron(gens[k], e1) for k in gens}
    return Representation(KreinTriplet(eta), doubled, swapped, meta={"doubled_from": n})
