"""Truncated permutative representations of pseudo-Cuntz algebras.

The space is spanned by canonical words: words that do not end with the
cycle word ``c`` (``s_c Omega = Omega``). Generator ``s_i`` sends ``e_J`` to
``e_{canon(iJ)}``; words longer than ``depth`` are truncated to zero. All
generator matrices are 0/1; the signs live in ``eta = diag(chi(J))``.
Relations are exact on the span of labels of length ``<= depth - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from kreinlab.cmatrix import ShapeError, adjoint, as_cmatrix, frobenius_norm
from kreinlab.krein import ContractError, KreinTriplet, Representation, dagger_adjoint
from kreinlab.report import CheckReport

Word = tuple[int, ...]


class UnsupportedCycleError(ValueError):
    pass


@dataclass(frozen=True)
class PCSpec:
    """Pseudo-Cuntz data: ``d`` positive and ``d_prime`` negative generators,
    truncation depth and the cycle word fixed on the vacuum."""

    d: int
    d_prime: int
    depth: int
    cycle: Word = (1,)

    def __post_init__(self):
        if self.d < 0 or self.d_prime < 0 or self.N < 2:
            raise ValueError("need d, d' >= 0 with d + d' >= 2")
        cycle = tuple(int(c) for c in self.cycle)
        if not 1 <= len(cycle) <= 2:
            raise UnsupportedCycleError(f"cycle words of length {len(cycle)} are not supported")
        for c in cycle:
            if not 1 <= c <= self.N:
                raise ValueError(f"cycle letter {c} out of range 1..{self.N}")
        object.__setattr__(self, "cycle", cycle)

    @property
    def N(self) -> int:
        return self.d + self.d_prime

    @property
    def eta_diag(self) -> tuple[int, ...]:
        return (1,) * self.d + (-1,) * self.d_prime


def chi(J: Sequence[int], spec_or_signs) -> int:
    """Product of the generator signs over the letters of ``J``."""
    signs = spec_or_signs.eta_diag if isinstance(spec_or_signs, PCSpec) else tuple(spec_or_signs)
    out = 1
    for j in J:
        if not 1 <= j <= len(signs):
            raise ValueError(f"letter {j} out of range 1..{len(signs)}")
        out *= signs[j - 1]
    return out


def canonicalize(J: Sequence[int], spec: PCSpec) -> Word:
    """Strip trailing copies of the cycle word."""
    J = tuple(J)
    for j in J:
        if not 1 <= j <= spec.N:
            raise ValueError(f"letter {j} out of range 1..{spec.N}")
    c = spec.cycle
    while len(J) >= len(c) and J[len(J) - len(c):] == c:
        J = J[: len(J) - len(c)]
    return J


def _is_canonical(J: Word, spec: PCSpec) -> bool:
    c = spec.cycle
    return not (len(J) >= len(c) and J[len(J) - len(c):] == c)


def canonical_words(spec: PCSpec, max_len: int) -> list[Word]:
    """Canonical words up to ``max_len`` in breadth-first order (by length,
    lexicographic within a length).

    Suffixes of canonical words are canonical, so each layer is obtained by
    prepending a letter to the previous one and keeping canonical results.
    """
    out: list[Word] = [()]
    layer: list[Word] = [()]
    for _ in range(max_len):
        layer = sorted({(i,) + J for J in layer for i in range(1, spec.N + 1)
                        if _is_canonical((i,) + J, spec)})
        out.extend(layer)
    return out


@dataclass
class PCRep:
    spec: PCSpec
    labels: list[Word]
    generators: list[np.ndarray]
    eta: np.ndarray
    index: dict[Word, int] = field(repr=False, default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def eta_diag(self) -> tuple[int, ...]:
        return self.spec.eta_diag

    @cached_property
    def triplet(self) -> KreinTriplet:
        return KreinTriplet(self.eta)

    @cached_property
    def daggers(self) -> list[np.ndarray]:
        return [dagger_adjoint(s, self.triplet) for s in self.generators]

    @property
    def representation(self) -> Representation:
        gens = {f"s{i + 1}": s for i, s in enumerate(self.generators)}
        alpha = {f"s{i + 1}": self.eta_diag[i] * s for i, s in enumerate(self.generators)}
        return Representation(self.triplet, gens, alpha)

    def projection(self, max_len: Optional[int] = None) -> np.ndarray:
        """Projection onto labels of length ``<= max_len`` (default ``depth - 1``)."""
        if max_len is None:
            max_len = self.spec.depth - 1
        return np.diag([1.0 if len(J) <= max_len else 0.0 for J in self.labels]).astype(np.complex128)

    def compress(self, X, max_len: Optional[int] = None) -> np.ndarray:
        p = self.projection(max_len)
        return p @ as_cmatrix(X) @ p


def build_representation(spec: PCSpec) -> PCRep:
    if spec.depth < 2:
        raise ValueError("depth must be at least 2")
    if chi(spec.cycle, spec) != 1:
        raise ContractError(
            f"cycle {spec.cycle} has chi = -1; eta = diag(chi) cannot be covariant "
            "(use the doubling construction instead)")
    labels = canonical_words(spec, spec.depth)
    index = {J: k for k, J in enumerate(labels)}
    n = len(labels)
    gens = []
    for i in range(1, spec.N + 1):
        s = np.zeros((n, n), dtype=np.complex128)
        for col, J in enumerate(labels):
            K = canonicalize((i,) + J, spec)
            row = index.get(K)
            if row is not None:
                s[row, col] = 1.0
        gens.append(s)
    eta = np.diag([float(chi(J, spec)) for J in labels]).astype(np.complex128)
    return PCRep(spec, labels, gens, eta, index)


def build_cuntz_generators(N: int, depth: int, cycle: Word = (1,)) -> tuple[list[Word], list[np.ndarray]]:
    """Generators of the permutative representation of the ordinary Cuntz
    algebra (all signs +1) for any cycle of length <= 2, without the
    covariance requirement. Used as input to the doubling construction."""
    rep = build_representation(PCSpec(N, 0, depth, cycle))
    return rep.labels, rep.generators


def cuntz_relation_residuals(generators: Sequence[np.ndarray], eta_space, eta_gen, projection,
                             prefix: str) -> dict[str, float]:
    """Residuals of ``s_i^dag s_j = eta_ij I`` and
    ``sum_ij eta_ij s_i s_j^dag = I`` compressed by ``projection``."""
    t = KreinTriplet(as_cmatrix(eta_space))
    eta_gen = as_cmatrix(eta_gen)
    N = len(generators)
    if eta_gen.shape != (N, N):
        raise ShapeError(f"generator metric has shape {eta_gen.shape}, expected {(N, N)}")
    p = as_cmatrix(projection)
    n = t.dim
    eye = np.eye(n, dtype=np.complex128)
    dag = [dagger_adjoint(s, t) for s in generators]
    iso = 0.0
    for i in range(N):
        for j in range(N):
            iso = max(iso, frobenius_norm(p @ (dag[i] @ generators[j] - eta_gen[i, j] * eye) @ p))
    total = np.zeros((n, n), dtype=np.complex128)
    for i in range(N):
        for j in range(N):
            if eta_gen[i, j] != 0:
                total += eta_gen[i, j] * generators[i] @ dag[j]
    comp = frobenius_norm(p @ (total - eye) @ p)
    return {f"{prefix}_isometry_relation": iso, f"{prefix}_completeness_relation": comp}


def basis_vector(rep: PCRep, J: Sequence[int]) -> np.ndarray:
    """``pi(s_J) Omega`` computed by applying generator matrices."""
    v = np.zeros(rep.dim, dtype=np.complex128)
    v[rep.index[()]] = 1.0
    for j in reversed(tuple(J)):
        v = rep.generators[j - 1] @ v
    return v


def relation_residuals(rep: PCRep, tol: float = 1e-12) -> CheckReport:
    spec = rep.spec
    params = {"d": spec.d, "dprime": spec.d_prime, "depth": spec.depth,
              "cycle": "".join(str(c) for c in spec.cycle), "dim": rep.dim}
    report = CheckReport("cuntz", params)
    p = rep.projection()
    eta_gen = np.diag(np.asarray(spec.eta_diag, dtype=np.complex128))
    for name, res in cuntz_relation_residuals(rep.generators, rep.eta, eta_gen, p, "cuntz").items():
        report.add(name, res, tol)
    # Metric (e_J|e_K) against chi computed from the labels.
    vecs = np.column_stack([basis_vector(rep, J) for J in rep.labels])
    gram = adjoint(vecs) @ rep.eta @ vecs
    expected = np.diag([float(chi(J, spec)) for J in rep.labels])
    report.add("cuntz_metric_chi", frobenius_norm(p @ (gram - expected) @ p), tol)
    from kreinlab.krein import covariance_residual, grading_residual

    r = rep.representation
    report.add("cuntz_covariance", covariance_residual(r), tol)
    parts = {f"s{i + 1}": ("even" if spec.eta_diag[i] > 0 else "odd") for i in range(spec.N)}
    report.add("cuntz_grading", grading_residual(r, parts), tol)
    negative = sum(1 for J in rep.labels if chi(J, spec) < 0)
    report.classification = "indefinite_metric" if negative else "positive_metric"
    report.notes.append(f"relations compressed to labels of length <= {spec.depth - 1}")
    return report


def rho_apply(rep: PCRep, X) -> np.ndarray:
    """Canonical endomorphism ``sum_i eta_ii s_i X s_i^dag``."""
    X = as_cmatrix(X)
    if X.shape != (rep.dim, rep.dim):
        raise ShapeError(f"operator shape {X.shape} does not match dimension {rep.dim}")
    out = np.zeros_like(X)
    for sign, s, sd in zip(rep.eta_diag, rep.generators, rep.daggers):
        out += sign * s @ X @ sd
    return out


def rho_multiplicativity_residual(rep: PCRep, X, Y) -> float:
    """``||P (rho(X)rho(Y) - rho(XY)) P||_F`` for ``X, Y`` first compressed to
    labels of length ``<= depth - 1`` (where the isometry relations hold)."""
    X = rep.compress(X)
    Y = rep.compress(Y)
    return frobenius_norm(rep.compress(rho_apply(rep, X) @ rho_apply(rep, Y) - rho_apply(rep, X @ Y)))


@dataclass(frozen=True)
class TransformResult:
    generators: list[np.ndarray]
    membership: bool
    eta_target: np.ndarray


def transform_generators(rep: PCRep, g, mode: str = "u_dd_action") -> TransformResult:
    """New generators ``t_i = sum_j M_ji s_j``.

    ``mode="lambda_unitary"``: ``M = Lambda^*``; the ``t_i`` satisfy the
    eta-Cuntz relations for ``Lambda eta Lambda^*``; ``membership`` reports
    whether ``Lambda`` is unitary.
    ``mode="u_dd_action"``: ``M = g``; ``membership`` is ``g eta g^* = eta``
    (then the ``t_i`` satisfy the original relations).
    """
    g = as_cmatrix(g)
    N = rep.N
    if g.shape != (N, N):
        raise ShapeError(f"transform has shape {g.shape}, expected {(N, N)}")
    if abs(np.linalg.det(g)) < 1e-12:
        raise ValueError("transform matrix is singular")
    eta = np.diag(np.asarray(rep.eta_diag, dtype=np.complex128))
    if mode == "lambda_unitary":
        m = adjoint(g)
        membership = frobenius_norm(adjoint(g) @ g - np.eye(N)) <= 1e-10
    elif mode == "u_dd_action":
        m = g
        membership = frobenius_norm(g @ eta @ adjoint(g) - eta) <= 1e-10
    else:
        raise ValueError(f"unknown transform mode {mode!r}")
    gens = [sum(m[j, i] * rep.generators[j] for j in range(N)) for i in range(N)]
    return TransformResult(gens, bool(membership), adjoint(m) @ eta @ m)
