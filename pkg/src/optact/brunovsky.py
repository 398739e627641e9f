"""Brunovsky normal form of a single-input pair (A, b).

For a cyclic pair the change of basis ``P(b)`` has columns
``f_k = p_k(A) b`` with ``p_k(A) = A^(n-k) + sum_{j=1}^{n-k} a_j A^(n-k-j)``
and ``p_n = I``, where ``a_j`` are the characteristic-polynomial coefficients.
Then ``A P = P C`` (``C`` the companion matrix) and ``P e_n = b``.

The design objective is built from ``M(b) = P(b) P(b)^T``, assembled as the
sum of rank-one terms ``p_k(A) b b^T p_k(A)^T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidInputError, NonControllableError, UnsupportedDimensionError
from .matrix_core import (
    DEFAULT_RANK_TOL,
    CharacteristicPolynomial,
    as_matrix,
    as_vector,
    char_poly,
    kalman_rank,
)


def _require_n2(n: int) -> None:
    if n < 2:
        raise UnsupportedDimensionError(f"state dimension must be at least 2, got {n}")


def _coefficients(cp) -> np.ndarray:
    if isinstance(cp, CharacteristicPolynomial):
        return cp.as_array()
    a = np.asarray(cp, dtype=float)
    if a.ndim != 1:
        raise InvalidInputError("coefficients must be a 1-D sequence")
    return a


def companion(cp) -> np.ndarray:
    """Companion matrix: ones on the superdiagonal, bottom row ``(-a_n, ..., -a_1)``.

    >>> companion((4.0, 3.0)).tolist()
    [[0.0, 1.0], [-3.0, -4.0]]
    """
    a = _coefficients(cp)
    n = a.size
    _require_n2(n)
    C = np.eye(n, k=1)
    C[-1, :] = -a[::-1]
    return C


def power_table(A) -> np.ndarray:
    """Stack ``[A^0, A^1, ..., A^(n-1)]`` of shape ``(n, n, n)``."""
    A = as_matrix(A)
    n = A.shape[0]
    table = np.empty((n, n, n))
    table[0] = np.eye(n)
    for k in range(1, n):
        table[k] = table[k - 1] @ A
    return table


def _pk_stack(powers: np.ndarray, a: np.ndarray) -> np.ndarray:
    n = powers.shape[0]
    coef = np.concatenate(([1.0], a))
    pk = np.empty_like(powers)
    for k in range(1, n + 1):
        m = n - k
        # p_k = sum_{j=0}^{m} a_j A^{m-j}, a_0 = 1
        acc = np.zeros((n, n))
        for j in range(m + 1):
            acc += coef[j] * powers[m - j]
        pk[k - 1] = acc
    return pk


def pk_matrices(A, cp) -> list[np.ndarray]:
    """``[p_1(A), ..., p_n(A)]``; the last entry is the identity."""
    A = as_matrix(A)
    n = A.shape[0]
    a = _coefficients(cp)
    if a.size != n:
        raise InvalidInputError(f"polynomial degree {a.size} does not match matrix size {n}")
    return list(_pk_stack(power_table(A), a))


class BrunovskyMap:
    """Precomputed ``p_k(A)`` for one dynamics matrix.

    The optimizer evaluates thousands of actuators against a fixed ``A``; the
    characteristic polynomial, the power table and the ``p_k`` stack are
    computed once here and never modified afterwards.
    """

    def __init__(self, A):
        A = as_matrix(A)
        self.n = A.shape[0]
        _require_n2(self.n)
        self.A = A
        self.charpoly = char_poly(A)
        self.powers = power_table(A)
        self.pk = _pk_stack(self.powers, self.charpoly.as_array())
        for arr in (self.A, self.powers, self.pk):
            arr.setflags(write=False)

    @property
    def companion(self) -> np.ndarray:
        return companion(self.charpoly)

    def basis(self, b) -> np.ndarray:
        """``P(b)`` without any cyclicity check."""
        b = as_vector(b, self.n)
        return (self.pk @ b).T

    def gram_batch(self, B) -> np.ndarray:
        """``M(b)`` for each row of ``B``; returns ``(N, n, n)``."""
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if B.shape[1] != self.n:
            raise DimensionError(f"actuators have length {B.shape[1]}, expected {self.n}")
        # F[i, k, :] = p_k(A) b_i ; M_i = sum_k F[i, k]^T F[i, k]
        F = (self.pk[None] @ B[:, None, :, None])[..., 0]
        M = np.swapaxes(F, 1, 2) @ F
        return 0.5 * (M + np.swapaxes(M, 1, 2))

    def gram(self, b) -> np.ndarray:
        b = as_vector(b, self.n)
        return self.gram_batch(b[None])[0]


@dataclass(frozen=True)
class BrunovskyBasis:
    P: np.ndarray
    pk: list
    companion: np.ndarray


@dataclass(frozen=True)
class BrunovskyResiduals:
    intertwining: float
    last_column: float


def _check_cyclic(A: np.ndarray, b: np.ndarray) -> None:
    r = kalman_rank(A, b, DEFAULT_RANK_TOL)
    n = A.shape[0]
    if r != n:
        raise NonControllableError(
            f"(A, b) violates the Kalman rank condition: rank {r} < {n}", rank=r, n=n
        )


def basis_matrix(A, b) -> BrunovskyBasis:
    """Change of basis ``P(b)`` together with its factors and the companion matrix.

    Raises
    ------
    NonControllableError
        If ``(A, b)`` is not cyclic; the numerical rank is attached.
    """
    bmap = BrunovskyMap(A)
    b = as_vector(b, bmap.n)
    _check_cyclic(bmap.A, b)
    return BrunovskyBasis(bmap.basis(b), list(bmap.pk), bmap.companion)


def gram(A, b) -> np.ndarray:
    """Symmetric PSD matrix ``P(b) P(b)^T``; singular when (A, b) is not cyclic."""
    bmap = BrunovskyMap(A)
    return bmap.gram(b)


def inverse_norm(A, b) -> float:
    """Spectral norm of ``P(b)^{-1}``, computed as ``lambda_1(M(b))^{-1/2}``."""
    from .spectral import smallest_eig_shifted

    bmap = BrunovskyMap(A)
    b = as_vector(b, bmap.n)
    _check_cyclic(bmap.A, b)
    lam = smallest_eig_shifted(bmap.gram(b)).value
    if lam <= 0.0:
        raise NonControllableError("Gram matrix is numerically singular", n=bmap.n)
    return float(lam ** -0.5)


def verify_brunovsky(A, b) -> BrunovskyResiduals:
    """Residuals of ``A P = P C`` (relative Frobenius) and ``P e_n = b``."""
    bmap = BrunovskyMap(A)
    b = as_vector(b, bmap.n)
    _check_cyclic(bmap.A, b)
    P = bmap.basis(b)
    C = bmap.companion
    A = bmap.A
    r1 = np.linalg.norm(A @ P - P @ C) / (np.linalg.norm(A) * np.linalg.norm(P))
    r2 = np.linalg.norm(P[:, -1] - b) / np.linalg.norm(b)
    return BrunovskyResiduals(float(r1), float(r2))


def closed_form_lambda1_heat2(b) -> float:
    """Closed-form ``lambda_1`` for the unscaled two-point Dirichlet Laplacian."""
    b1, b2 = as_vector(b, 2)
    return float(
        4 * b1 * b2 + 3 * (b1 ** 2 + b2 ** 2)
        - 2 * np.sqrt((2 * b1 ** 2 + 2 * b1 * b2 + b2 ** 2) * (b1 ** 2 + 2 * b1 * b2 + 2 * b2 ** 2))
    )
