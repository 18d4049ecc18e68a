"""Truncated bosonic and exact fermionic Fock spaces with eta-twisted ladders.

Conventions
-----------
* ``ann(f) = sum_k conj(f_k) a_k`` is the standard annihilator, antilinear in
  ``f``; ``cre(f) = ann(f)^*``.
* The eta-twisted creator is ``eta_cre(f) = cre(eta1 f)``. With the Krein
  metric ``Gamma(eta1)`` on Fock space this is exactly the dagger-adjoint of
  ``ann(f)``, and the pair obeys
  ``ann(f) eta_cre(g) -/+ eta_cre(g) ann(f) = <f|eta1 g> I``.
* Fermionic modes carry Jordan-Wigner sign strings so distinct modes
  anticommute. Bosonic modes are tensor factors truncated at occupation
  ``cutoff``; the creator annihilates the top state, so commutator identities
  only hold on occupations ``<= cutoff - 1`` and are checked there.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from kreinlab.cmatrix import ShapeError, adjoint, as_cmatrix, frobenius_norm, mat_exp
from kreinlab.krein import ContractError, KreinTriplet, dagger_adjoint, krein_form
from kreinlab.report import CheckReport

BOSE = "bose"
FERMI = "fermi"


def _is_signature_diagonal(m: np.ndarray, tol: float = 1e-12) -> bool:
    off = m - np.diag(np.diag(m))
    return frobenius_norm(off) <= tol and bool(np.all(np.abs(np.abs(np.diag(m)) - 1) <= tol))


@dataclass(frozen=True)
class FockSpec:
    statistics: str
    modes: int
    cutoff: int = 1
    eta1: Optional[np.ndarray] = None
    diagonalizer: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.statistics not in (BOSE, FERMI):
            raise ValueError(f"statistics must be 'bose' or 'fermi', got {self.statistics!r}")
        if self.modes < 1:
            raise ValueError("need at least one mode")
        if self.statistics == BOSE and self.cutoff < 1:
            raise ValueError("bosonic cutoff must be >= 1")
        eta1 = np.eye(self.modes, dtype=np.complex128) if self.eta1 is None else as_cmatrix(self.eta1)
        # Validates self-adjoint unitary.
        KreinTriplet(eta1)
        if eta1.shape != (self.modes, self.modes):
            raise ShapeError(f"eta1 has shape {eta1.shape}, expected {(self.modes, self.modes)}")
        object.__setattr__(self, "eta1", eta1)
        if self.diagonalizer is not None:
            w = as_cmatrix(self.diagonalizer)
            if frobenius_norm(adjoint(w) @ w - np.eye(self.modes)) > 1e-12:
                raise ContractError("diagonalizer is not unitary")
            if not _is_signature_diagonal(adjoint(w) @ eta1 @ w):
                raise ContractError("diagonalizer does not bring eta1 to diagonal +-1 form")
            object.__setattr__(self, "diagonalizer", w)

    @classmethod
    def from_signs(cls, statistics: str, signs: Sequence[int], cutoff: int = 1) -> "FockSpec":
        return cls(statistics, len(signs), cutoff, np.diag(np.asarray(signs, dtype=np.complex128)))

    @property
    def local_dim(self) -> int:
        return 2 if self.statistics == FERMI else self.cutoff + 1


def _single_mode_annihilator(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(np.complex128)


class FockBasis:
    """Occupation-number basis in lexicographic order (mode 1 most
    significant); the vacuum is state 0."""

    def __init__(self, spec: FockSpec):
        self.spec = spec
        self.states = list(itertools.product(range(spec.local_dim), repeat=spec.modes))
        self.index = {s: k for k, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def modes(self) -> int:
        return self.spec.modes

    @property
    def eta1(self) -> np.ndarray:
        return self.spec.eta1

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.complex128)
        v[0] = 1.0
        return v

    @cached_property
    def mode_annihilators(self) -> list[np.ndarray]:
        d = self.spec.modes
        q = self.spec.local_dim
        a1 = _single_mode_annihilator(q)
        eye = np.eye(q, dtype=np.complex128)
        parity = np.diag([1.0, -1.0]).astype(np.complex128)
        ops = []
        for k in range(d):
            factors = []
            for j in range(d):
                if j < k:
                    factors.append(parity if self.spec.statistics == FERMI else eye)
                elif j == k:
                    factors.append(a1)
                else:
                    factors.append(eye)
            m = factors[0]
            for f in factors[1:]:
                m = np.kron(m, f)
            ops.append(m)
        return ops

    def _coeffs(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=np.complex128).reshape(-1)
        if f.shape[0] != self.spec.modes:
            raise ShapeError(f"one-particle vector has length {f.shape[0]}, expected {self.spec.modes}")
        return f

    def ann(self, f) -> np.ndarray:
        f = self._coeffs(f)
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for c, a in zip(f, self.mode_annihilators):
            if c != 0:
                out += np.conj(c) * a
        return out

    def cre(self, f) -> np.ndarray:
        return adjoint(self.ann(f))

    def eta_cre(self, f) -> np.ndarray:
        return self.cre(self.eta1 @ self._coeffs(f))

    @cached_property
    def gamma(self) -> np.ndarray:
        return second_quantization(self)

    @cached_property
    def triplet(self) -> KreinTriplet:
        return KreinTriplet(self.gamma)

    def safe_projection(self) -> np.ndarray:
        """Projection onto states where the truncated CCR holds exactly
        (every occupation ``<= cutoff - 1``); identity for fermions."""
        if self.spec.statistics == FERMI:
            return np.eye(self.dim, dtype=np.complex128)
        keep = [all(n <= self.spec.cutoff - 1 for n in s) for s in self.states]
        return np.diag(np.asarray(keep, dtype=float)).astype(np.complex128)

    def occupation_projection(self, max_occupation: int) -> np.ndarray:
        keep = [all(n <= max_occupation for n in s) for s in self.states]
        return np.diag(np.asarray(keep, dtype=float)).astype(np.complex128)


def ladder_ops(basis: FockBasis, f) -> tuple[np.ndarray, np.ndarray]:
    """``(ann(f), eta_cre(f))``."""
    return basis.ann(f), basis.eta_cre(f)


def second_quantization(basis: FockBasis) -> np.ndarray:
    """``Gamma(eta1)`` on Fock space.

    Diagonal ``eta1``: ``Gamma |n> = prod_k eta_kk**n_k |n>``.
    Otherwise (fermions only) a diagonalizer ``W`` with ``W^* eta1 W``
    diagonal must be set on the FockSpec; ``Gamma`` is then the product of the
    second-quantized reflections ``I - 2 n_w`` over the columns ``w`` of
    ``W`` with eigenvalue -1.
    """
    spec = basis.spec
    eta1 = spec.eta1
    if _is_signature_diagonal(eta1):
        signs = np.real(np.diag(eta1)).round()
        diag = [np.prod([signs[k] ** n for k, n in enumerate(s)]) for s in basis.states]
        return np.diag(np.asarray(diag, dtype=float)).astype(np.complex128)
    if spec.diagonalizer is None:
        raise ContractError("non-diagonal eta1 needs a diagonalizer on the FockSpec")
    if spec.statistics != FERMI:
        raise ContractError("non-diagonal eta1 is only supported for fermions")
    w = spec.diagonalizer
    d = np.real(np.diag(adjoint(w) @ eta1 @ w)).round()
    gamma = np.eye(basis.dim, dtype=np.complex128)
    for k in np.nonzero(d < 0)[0]:
        b = basis.ann(w[:, k])
        gamma = gamma @ (np.eye(basis.dim) - 2 * adjoint(b) @ b)
    return gamma


def weyl_operator(basis: FockBasis, f, tol: float = 1e-16) -> np.ndarray:
    """``W(f) = exp(i Phi(f))`` with ``Phi(f) = (ann(f) + ann(f)^*)/sqrt(2)``
    built from the standard ladders."""
    if basis.spec.statistics != BOSE:
        raise ContractError("Weyl operators need bosonic statistics")
    a = basis.ann(f)
    phi = (a + adjoint(a)) / np.sqrt(2.0)
    return mat_exp(1j * phi, tol)


def weyl_vacuum_expectation(basis: FockBasis, f) -> complex:
    """``(Omega | W(f) Omega)`` in the Krein metric ``Gamma(eta1)``."""
    omega = basis.vacuum()
    return krein_form(omega, weyl_operator(basis, f) @ omega, basis.triplet)


def weyl_group_law_residual(basis: FockBasis, f, g, max_occupation: Optional[int] = None) -> float:
    """``||P (W(f)W(g) - exp(-i Im<f|g>/2) W(f+g)) P||_F`` with ``P`` onto
    occupations ``<= max_occupation`` (default ``cutoff // 2``)."""
    f = np.asarray(f, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    if max_occupation is None:
        max_occupation = basis.spec.cutoff // 2
    p = basis.occupation_projection(max_occupation)
    phase = np.exp(-0.5j * np.vdot(f, g).imag)
    lhs = weyl_operator(basis, f) @ weyl_operator(basis, g)
    rhs = phase * weyl_operator(basis, f + g)
    return frobenius_norm(p @ (lhs - rhs) @ p)


def _bracket(x: np.ndarray, y: np.ndarray, statistics: str) -> np.ndarray:
    return x @ y + y @ x if statistics == FERMI else x @ y - y @ x


def relation_report(basis: FockBasis, f_samples, transform=None, tol: float = 1e-12,
                    prefix: str = "fock") -> CheckReport:
    """Residuals of the eta-CCR / eta-CAR relation blocks on sample vectors.

    With ``transform=U`` the checked operators are ``t(f) = ann(U^* f)`` and
    ``t^dag(f) = eta_cre(U^* f)``, and the target metric is ``U eta1 U^*``.
    """
    samples = [basis._coeffs(f) for f in f_samples]
    if len(samples) < 2:
        raise ValueError("need at least two sample vectors")
    stat = basis.spec.statistics
    eta1 = basis.eta1
    if transform is None:
        u = np.eye(basis.modes, dtype=np.complex128)
    else:
        u = as_cmatrix(transform)
        if frobenius_norm(adjoint(u) @ u - np.eye(basis.modes)) > 1e-12:
            raise ContractError("transform must be unitary")
    target = u @ eta1 @ adjoint(u)
    uh = adjoint(u)
    a = [basis.ann(uh @ f) for f in samples]
    ad = [basis.eta_cre(uh @ f) for f in samples]
    p = basis.safe_projection()
    eye = np.eye(basis.dim, dtype=np.complex128)

    res_mixed = res_aa = res_cc = 0.0
    for i, f in enumerate(samples):
        for j, g in enumerate(samples):
            rhs = np.vdot(f, target @ g) * eye
            res_mixed = max(res_mixed, frobenius_norm(p @ (_bracket(a[i], ad[j], stat) - rhs) @ p))
            res_aa = max(res_aa, frobenius_norm(p @ _bracket(a[i], a[j], stat) @ p))
            res_cc = max(res_cc, frobenius_norm(p @ _bracket(ad[i], ad[j], stat) @ p))

    tag = "car" if stat == FERMI else "ccr"
    label = f"{prefix}_{tag}" if transform is None else f"{prefix}_transform_{tag}"
    params = {"statistics": stat, "modes": basis.modes, "samples": len(samples)}
    if stat == BOSE:
        params["cutoff"] = basis.spec.cutoff
    rep = CheckReport(prefix, params)
    rep.add(f"{label}_ann_dagger_relation", res_mixed, tol)
    rep.add(f"{label}_ann_ann_relation", res_aa, tol)
    rep.add(f"{label}_dagger_dagger_relation", res_cc, tol)

    gamma = basis.gamma
    t = basis.triplet
    rep.add(f"{label}_dagger_is_krein_adjoint",
            max(frobenius_norm(ad[i] - dagger_adjoint(a[i], t)) for i in range(len(samples))), tol)
    if transform is None:
        rep.add(f"{label}_gamma_involutive_unitary",
                frobenius_norm(gamma @ gamma - eye) + frobenius_norm(adjoint(gamma) - gamma), tol)
        rep.add(f"{label}_gamma_covariance",
                max(frobenius_norm(gamma @ basis.ann(f) @ gamma - basis.ann(eta1 @ f)) for f in samples), tol)

    omega = basis.vacuum()
    gram = np.array([[krein_form(basis.eta_cre(uh @ e) @ omega, basis.eta_cre(uh @ e2) @ omega, t)
                      for e2 in np.eye(basis.modes)] for e in np.eye(basis.modes)])
    rep.add(f"{label}_one_particle_metric", frobenius_norm(gram - target), tol)
    if np.any(np.linalg.eigvalsh(target) < 0):
        rep.classification = "indefinite_metric"
        negs = [k for k in range(basis.modes) if gram[k, k].real < 0]
        for k in negs:
            rep.notes.append(f"indefinite metric: (a_dag(e{k + 1}) Omega | a_dag(e{k + 1}) Omega) = {gram[k, k].real:g}")
    else:
        rep.classification = "positive_metric"
    if stat == BOSE:
        rep.notes.append(f"CCR residuals compressed to occupations <= {basis.spec.cutoff - 1} in every mode")
    return rep


@dataclass
class FPGhosts:
    basis: FockBasis
    ops: dict[str, np.ndarray]
    gamma: np.ndarray
    daggers: dict[str, np.ndarray] = field(default_factory=dict)


def fp_eta(pairs: int) -> tuple[np.ndarray, np.ndarray]:
    """Pair-swap symmetry ``eta e_{2n} = -e_{2n+1}``, ``eta e_{2n+1} = -e_{2n}``
    and its diagonalizer with columns ``(e_{2n} -/+ e_{2n+1})/sqrt(2)``."""
    n = 2 * pairs
    eta = np.zeros((n, n), dtype=np.complex128)
    w = np.zeros((n, n), dtype=np.complex128)
    r = 1 / np.sqrt(2.0)
    for k in range(pairs):
        eta[2 * k, 2 * k + 1] = eta[2 * k + 1, 2 * k] = -1
        w[2 * k, 2 * k], w[2 * k + 1, 2 * k] = r, -r  # eigenvalue +1
        w[2 * k, 2 * k + 1], w[2 * k + 1, 2 * k + 1] = r, r  # eigenvalue -1
    return eta, w


def fp_ghost_ops(pairs: int) -> FPGhosts:
    """Ghost/antighost operators embedded in the eta-CAR algebra on ``2*pairs``
    fermionic modes (dimension ``4**pairs``)."""
    if pairs < 1:
        raise ValueError("need at least one ghost pair")
    eta, w = fp_eta(pairs)
    basis = FockBasis(FockSpec(FERMI, 2 * pairs, eta1=eta, diagonalizer=w))
    t = basis.triplet
    e = np.eye(2 * pairs)
    a = [basis.ann(e[k]) for k in range(2 * pairs)]
    ad = [dagger_adjoint(x, t) for x in a]
    r = 1 / np.sqrt(2.0)
    ops = {"c0": r * (a[0] + ad[0]), "cbar0": r * (a[1] + ad[1])}
    for n in range(1, pairs):
        ops[f"c{n}"] = a[2 * n]
        ops[f"cbar{n}"] = a[2 * n + 1]
    daggers = {k: dagger_adjoint(v, t) for k, v in ops.items()}
    return FPGhosts(basis, ops, basis.gamma, daggers)


def fp_ghost_report(pairs: int, tol: float = 1e-12) -> CheckReport:
    gh = fp_ghost_ops(pairs)
    dim = gh.basis.dim
    eye = np.eye(dim, dtype=np.complex128)
    rep = CheckReport("ghosts", {"pairs": pairs, "dim": dim})

    gens: dict[str, np.ndarray] = {}
    for k, v in gh.ops.items():
        gens[k] = v
        if k not in ("c0", "cbar0"):
            gens[k + "_dag"] = gh.daggers[k]

    def expected(x: str, y: str) -> float:
        pair = {x, y}
        if pair == {"c0", "cbar0"}:
            return -1.0
        for m in range(1, pairs):
            if pair == {f"c{m}", f"cbar{m}_dag"} or pair == {f"c{m}_dag", f"cbar{m}"}:
                return -1.0
        return 0.0

    rep.add("ghost_c0_cbar0_anticommutator",
            frobenius_norm(gh.ops["c0"] @ gh.ops["cbar0"] + gh.ops["cbar0"] @ gh.ops["c0"] + eye), tol)
    rep.add("ghost_zero_modes_self_adjoint",
            frobenius_norm(gh.daggers["c0"] - gh.ops["c0"]) + frobenius_norm(gh.daggers["cbar0"] - gh.ops["cbar0"]), tol)
    worst_nonzero = 0.0
    for m in range(1, pairs):
        for n in range(1, pairs):
            delta = 1.0 if m == n else 0.0
            c, cb_d = gh.ops[f"c{m}"], gh.daggers[f"cbar{n}"]
            c_d, cb = gh.daggers[f"c{m}"], gh.ops[f"cbar{n}"]
            worst_nonzero = max(worst_nonzero,
                                frobenius_norm(c @ cb_d + cb_d @ c + delta * eye),
                                frobenius_norm(c_d @ cb + cb @ c_d + delta * eye))
    if pairs > 1:
        rep.add("ghost_nonzero_mode_anticommutators", worst_nonzero, tol)
    worst_rest = 0.0
    names = sorted(gens)
    for i, x in enumerate(names):
        for y in names[i:]:
            target = expected(x, y)
            anti = gens[x] @ gens[y] + gens[y] @ gens[x]
            worst_rest = max(worst_rest, frobenius_norm(anti - target * eye))
    rep.add("ghost_all_anticommutators", worst_rest, tol)
    e = np.eye(2 * pairs)
    rep.add("ghost_gamma_dagger_matches_eta_creator",
            max(frobenius_norm(dagger_adjoint(gh.basis.ann(e[k]), gh.basis.triplet) - gh.basis.eta_cre(e[k]))
                for k in range(2 * pairs)), tol)
    rep.notes.append(f"{2 * pairs} fermionic modes, pair-swap eta; Gamma(eta) built in the diagonal frame")
    return rep
