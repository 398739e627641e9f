"""Dense real linear algebra: characteristic polynomials, Krylov matrices, rank.

Matrices are plain ``float64`` numpy arrays. Every public function validates
its inputs and returns new arrays; nothing is mutated in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidInputError

DEFAULT_RANK_TOL = 1e-10


def as_matrix(A, name: str = "A", square: bool = True) -> np.ndarray:
    """Coerce to a finite 2-D float array, optionally requiring a square shape."""
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return M


def as_vector(b, n: int | None = None, name: str = "b") -> np.ndarray:
    v = np.asarray(b, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if n is not None and v.size != n:
        raise DimensionError(f"{name} has length {v.size}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return v


@dataclass(frozen=True)
class CharacteristicPolynomial:
    """Monic polynomial ``x^n + a_1 x^(n-1) + ... + a_n``.

    ``coefficients`` holds ``(a_1, ..., a_n)``; the leading 1 is implicit.
    """

    coefficients: tuple[float, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def as_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=float)

    def __call__(self, A) -> np.ndarray:
        """Evaluate at a square matrix with Horner's scheme."""
        A = as_matrix(A)
        if A.shape[0] != self.degree:
            raise DimensionError(f"polynomial of degree {self.degree} evaluated at {A.shape} matrix")
        eye = np.eye(self.degree)
        result = eye.copy()
        for a in self.coefficients:
            result = result @ A + a * eye
        return result

    def cayley_hamilton_residual(self, A) -> float:
        """``||p(A)||_F / max(1, ||A||_F)^n``; small when ``self`` belongs to ``A``."""
        A = as_matrix(A)
        scale = max(1.0, float(np.linalg.norm(A))) ** self.degree
        return float(np.linalg.norm(self(A))) / scale


def char_poly(A) -> CharacteristicPolynomial:
    """Characteristic polynomial by the Faddeev-LeVerrier recursion.

    Works for any square matrix, diagonalizable or not. Trace sums use
    ``math.fsum`` to curb cancellation.

    Examples
    --------
    >>> char_poly([[-2.0, 1.0], [1.0, -2.0]]).coefficients
    (4.0, 3.0)
    """
    A = as_matrix(A)
    n = A.shape[0]
    eye = np.eye(n)
    M = eye
    coeffs = []
    for k in range(1, n + 1):
        AM = A @ M
        a_k = -math.fsum(np.diag(AM)) / k
        coeffs.append(a_k)
        M = AM + a_k * eye
    return CharacteristicPolynomial(tuple(float(c) for c in coeffs))


def kalman_matrix(A, b) -> np.ndarray:
    """Columns ``[b, Ab, ..., A^(n-1) b]``."""
    A = as_matrix(A)
    n = A.shape[0]
    b = as_vector(b, n)
    K = np.empty((n, n))
    col = b.copy()
    for k in range(n):
        K[:, k] = col
        col = A @ col
    return K


def rank(M, tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank by Gaussian elimination with partial pivoting.

    A pivot counts when its magnitude exceeds ``tol`` times the largest row
    norm of ``M``.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    R = as_matrix(M, "M", square=False).copy()
    rows, cols = R.shape
    scale = float(np.max(np.linalg.norm(R, axis=1)))
    if scale == 0.0:
        return 0
    threshold = tol * scale
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[p, c]) <= threshold:
            continue
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r + 1:, c:] -= np.outer(R[r + 1:, c] / R[r, c], R[r, c:])
        r += 1
    return r


def kalman_rank(A, b, tol: float = DEFAULT_RANK_TOL) -> int:
    """Rank of the Kalman matrix after normalizing each Krylov column.

    Column normalization keeps the threshold meaningful when ``||A^k b||``
    grows or decays geometrically.
    """
    K = kalman_matrix(A, b)
    norms = np.linalg.norm(K, axis=0)
    nz = norms > 0
    K[:, nz] /= norms[nz]
    return rank(K, tol)


def is_cyclic(A, b, tol: float = DEFAULT_RANK_TOL) -> bool:
    """True iff (A, b) satisfies the Kalman rank condition."""
    A = as_matrix(A)
    return kalman_rank(A, b, tol) == A.shape[0]
