"""Dense complex matrices and the few spectral tools the package needs.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The helpers here
only add shape checking, the residual metric used throughout (Frobenius
norm), a closed-form 2x2 eigensolver and a scaling-and-squaring Taylor
exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

DEFAULT_TOL = 1e-12


class ShapeError(ValueError):
    """Raised when matrix shapes are not conformable."""


def as_cmatrix(a) -> np.ndarray:
    """Return ``a`` as a 2-D complex128 array (no copy when already one)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def zeros(n: int, m: Optional[int] = None) -> np.ndarray:
    return np.zeros((n, n if m is None else m), dtype=np.complex128)


def mat_ops(a, b=None, kind: str = "mul", c: complex = 1.0) -> np.ndarray:
    """Ring operations with explicit shape checking.

    ``kind`` is one of ``"add"``, ``"mul"`` or ``"scale"``; ``scale`` ignores
    ``b`` and returns ``c * a``.
    """
    a = as_cmatrix(a)
    if kind == "scale":
        return complex(c) * a
    b = as_cmatrix(b)
    if kind == "add":
        if a.shape != b.shape:
            raise ShapeError(f"cannot add shapes {a.shape} and {b.shape}")
        return a + b
    if kind == "mul":
        if a.shape[1] != b.shape[0]:
            raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
        return a @ b
    raise ValueError(f"unknown matrix operation {kind!r}")


def adjoint(a) -> np.ndarray:
    """Hermitian conjugate (conjugate transpose)."""
    return as_cmatrix(a).conj().T


def frobenius_norm(a) -> float:
    a = np.asarray(a, dtype=np.complex128)
    return float(np.sqrt(np.sum(a.real**2 + a.imag**2)))


def check_square(a, name: str = "matrix") -> np.ndarray:
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class Eig2x2:
    """Eigen-data of a 2x2 matrix.

    For a defective matrix ``eigenvalues`` holds the double root twice,
    ``eigenvectors`` holds a single vector and ``defective`` is set.
    """

    eigenvalues: tuple[complex, complex]
    eigenvectors: tuple[np.ndarray, ...]
    defective: bool
    discriminant: complex


def _kernel_vector(m: np.ndarray) -> np.ndarray:
    # Null vector of a rank-1 2x2 matrix: orthogonal to its largest row.
    r0, r1 = m[0], m[1]
    row = r0 if np.abs(r0).sum() >= np.abs(r1).sum() else r1
    v = np.array([-row[1], row[0]], dtype=np.complex128)
    return v / np.linalg.norm(v)


def eig2x2(a, tol: float = DEFAULT_TOL) -> Eig2x2:
    """Eigenvalues and eigenvectors of a 2x2 matrix from its characteristic
    polynomial ``x**2 - tr(a) x + det(a)``.

    The discriminant is treated as zero when ``|disc| <= tol * scale**2``
    with ``scale = max(1, max|a_ij|)``; in that case the matrix is flagged
    defective unless it is already a multiple of the identity.
    """
    a = as_cmatrix(a)
    if a.shape != (2, 2):
        raise ShapeError(f"eig2x2 needs a 2x2 matrix, got {a.shape}")
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    disc = tr * tr - 4.0 * det
    scale = max(1.0, float(np.abs(a).max()))
    if abs(disc) <= tol * scale * scale:
        lam = tr / 2.0
        shifted = a - lam * np.eye(2)
        if np.abs(shifted).max() <= tol * scale:
            e = np.eye(2, dtype=np.complex128)
            return Eig2x2((lam, lam), (e[:, 0], e[:, 1]), False, disc)
        return Eig2x2((lam, lam), (_kernel_vector(shifted),), True, disc)
    root = np.sqrt(complex(disc))
    # Avoid cancellation: take the larger-magnitude root first, then Vieta.
    q = tr + root if abs(tr + root) >= abs(tr - root) else tr - root
    l1 = q / 2.0
    l2 = det / l1 if l1 != 0 else (tr - q) / 2.0
    # Real parts equal up to roundoff (conjugate pairs) are ordered by imaginary part.
    same_re = abs(l1.real - l2.real) <= 1e-12 * scale
    if (not same_re and l1.real < l2.real) or (same_re and l1.imag < l2.imag):
        l1, l2 = l2, l1
    vecs = tuple(_kernel_vector(a - lam * np.eye(2)) for lam in (l1, l2))
    return Eig2x2((complex(l1), complex(l2)), vecs, False, disc)


def mat_exp(a, tol: float = 1e-16) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Taylor kernel.

    The matrix is scaled by ``2**-s`` so its Frobenius norm is at most 1/2;
    the Taylor series of the scaled block is summed until the next term
    would fall below ``tol`` (relative to 1), then squared ``s`` times.
    """
    a = check_square(a, "exponent")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = a.shape[0]
    norm = frobenius_norm(a)
    s = 0
    if norm > 0.5:
        s = int(math.ceil(math.log2(norm / 0.5)))
    b = a / (2.0**s)
    bnorm = frobenius_norm(b)
    result = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    k = 1
    # Remainder after term k is bounded by bnorm**(k+1)/(k+1)! * 2 for bnorm <= 1/2.
    while True:
        term = term @ b / k
        result = result + term
        bound = 2.0 * bnorm ** (k + 1) / math.factorial(k + 1)
        if bound < tol or k > 60:
            break
        k += 1
    for _ in range(s):
        result = result @ result
    return result
