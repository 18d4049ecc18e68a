"""Involutions on 2x2 matrices twisted by Pauli matrices.

``X^{dag_i} = sigma_i X^* sigma_i``; ``dag_0`` is the ordinary hermitian
conjugate and is positive definite, the other three are indefinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kreinlab.cmatrix import ShapeError, adjoint, as_cmatrix, eig2x2, frobenius_norm
from kreinlab.report import CheckReport

SIGMA = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


class NoWitnessError(ValueError):
    """The standard conjugate has no negative-spectrum witness."""


def _check_index(i: int) -> int:
    if i not in (0, 1, 2, 3):
        raise ValueError(f"Pauli index must be 0, 1, 2 or 3, got {i!r}")
    return i


def _check_2x2(X) -> np.ndarray:
    X = as_cmatrix(X)
    if X.shape != (2, 2):
        raise ShapeError(f"expected a 2x2 matrix, got {X.shape}")
    return X


def pauli_dagger(i: int, X) -> np.ndarray:
    s = SIGMA[_check_index(i)]
    return s @ adjoint(_check_2x2(X)) @ s


@dataclass(frozen=True)
class Witness:
    x: np.ndarray
    y: np.ndarray
    sp_x: tuple[complex, complex]
    sp_y: tuple[complex, complex]


def indefiniteness_witness(i: int) -> Witness:
    """Fixed pair ``(x, y)`` with ``sp(x^dag x)`` positive and ``sp(y^dag y)``
    negative for the involution ``dag_i``, ``i`` in 1..3."""
    _check_index(i)
    if i == 0:
        raise NoWitnessError("dag_0 is positive definite; no witness exists")
    x = SIGMA[0].copy()
    # sigma_i anticommutes with sigma_3 for i = 1, 2 and with sigma_1 for i = 3.
    y = SIGMA[3].copy() if i in (1, 2) else SIGMA[1].copy()
    sp_x = eig2x2(pauli_dagger(i, x) @ x).eigenvalues
    sp_y = eig2x2(pauli_dagger(i, y) @ y).eigenvalues
    return Witness(x, y, sp_x, sp_y)


def lie_membership(i: int, X, tol: float = 1e-10) -> bool:
    """``X^{dag_i} + X == 0`` up to ``tol`` in Frobenius norm."""
    X = _check_2x2(X)
    return frobenius_norm(pauli_dagger(i, X) + X) <= tol


def lie_parametrization(i: int, a: complex, b: float, c: float) -> np.ndarray:
    """A member of the real Lie algebra ``{X : X^{dag_i} + X = 0}`` built from
    one complex and two real parameters (real dimension 4 in every case)."""
    _check_index(i)
    if i == 0:
        return np.array([[1j * a.real, b + 1j * c], [-b + 1j * c, 1j * a.imag]], dtype=np.complex128)
    if i == 1:
        return np.array([[a, 1j * b], [1j * c, -np.conj(a)]], dtype=np.complex128)
    if i == 2:
        # Literal solution set: real off-diagonal, d = -conj(a).
        return np.array([[a, b], [c, -np.conj(a)]], dtype=np.complex128)
    return np.array([[1j * a.real, b + 1j * c], [b - 1j * c, 1j * a.imag]], dtype=np.complex128)


def solution_space_dimension(i: int, tol: float = 1e-10) -> int:
    """Real dimension of ``{X : X^{dag_i} + X = 0}`` from the rank of the
    real-linear map ``X -> X^{dag_i} + X`` on R^8."""
    cols = []
    for k in range(8):
        e = np.zeros(8)
        e[k] = 1.0
        X = (e[0::2] + 1j * e[1::2]).reshape(2, 2)
        Y = pauli_dagger(i, X) + X
        cols.append(np.column_stack([Y.real.ravel(), Y.imag.ravel()]).ravel())
    m = np.array(cols).T
    return 8 - int(np.linalg.matrix_rank(m, tol=tol))


def involution_report(i: int) -> CheckReport:
    rep = CheckReport("involutions", {"pauli": i})
    s3 = SIGMA[3]
    rep.add(f"pauli{i}_dagger_involutive_on_sigmas",
            max(frobenius_norm(pauli_dagger(i, pauli_dagger(i, s)) - s) for s in SIGMA), 1e-13)
    if i == 1:
        rep.add("I11_dag_I11_is_minus_I", frobenius_norm(pauli_dagger(1, s3) @ s3 + np.eye(2)), 0.0)
    if i == 0:
        rep.notes.append("dag_0 is the standard conjugate: positive definite, no witness")
        rep.classification = "positive_definite"
    else:
        w = indefiniteness_witness(i)
        rep.add(f"pauli{i}_witness_x_spectrum_plus_one", max(abs(z - 1) for z in w.sp_x), 1e-13)
        rep.add(f"pauli{i}_witness_y_spectrum_minus_one", max(abs(z + 1) for z in w.sp_y), 1e-13)
        rep.classification = "indefinite"
        rep.eigenvalues = list(w.sp_y)
    rep.add(f"pauli{i}_lie_solution_dimension_is_4", abs(solution_space_dimension(i) - 4), 0.0)
    return rep
