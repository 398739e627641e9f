"""Controllability cost computed directly from Gramians.

Nothing here uses the Brunovsky change of basis except the final assembly in
:func:`factorization_report`, so these routines serve as an independent check
of the factorized cost bound.

The minimal ``L^2(0, T)`` control steering ``y0`` to zero has squared norm
``(E y0)^T W^{-1} (E y0)`` with ``E = exp(A T)`` and ``W`` the reachability
Gramian, so the cost constant is ``sqrt(lambda_max(E^T W^{-1} E))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .brunovsky import companion, inverse_norm
from .errors import (
    DegenerateGridError,
    FactorizationViolation,
    IllConditionedError,
    InvalidInputError,
    NonControllableError,
    NumericRangeError,
)
from .matrix_core import DEFAULT_RANK_TOL, as_matrix, as_vector, char_poly, kalman_rank
from .spectral import jacobi_spectrum

MIN_HORIZON = 1e-4
COND_WARN = 1e12
RATIO_SLACK = 1e-4


@dataclass(frozen=True)
class Gramian:
    W: np.ndarray
    T: float


@dataclass(frozen=True)
class CostReport:
    exact_cost: float
    kappa: float
    inverse_norm: float
    upper_bound: float
    ratio: float

    def as_dict(self) -> dict:
        return {
            "exact_cost": self.exact_cost,
            "kappa": self.kappa,
            "inverse_norm": self.inverse_norm,
            "upper_bound": self.upper_bound,
            "ratio": self.ratio,
        }


def expm(A) -> np.ndarray:
    """Matrix exponential (scaling and squaring, degree-13 Pade)."""
    A = as_matrix(A)
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(A)
    if not np.all(np.isfinite(E)):
        raise NumericRangeError("matrix exponential overflows double precision")
    return E


def _check_horizon(T: float) -> float:
    T = float(T)
    if not T > 0:
        raise InvalidInputError(f"horizon must be positive, got {T}")
    if T < MIN_HORIZON:
        raise InvalidInputError(f"horizon {T} is below the supported minimum {MIN_HORIZON}")
    return T


def gramian(A, b, T: float) -> Gramian:
    """``W_T = int_0^T exp(As) b b^T exp(A^T s) ds`` via one block exponential.

    With ``C = [[-A, b b^T], [0, A^T]]`` and ``exp(C T) = [[F11, F12], [0, F22]]``
    one has ``W_T = F22^T F12``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    b = as_vector(b, n)
    T = _check_horizon(T)
    C = np.zeros((2 * n, 2 * n))
    C[:n, :n] = -A
    C[:n, n:] = np.outer(b, b)
    C[n:, n:] = A.T
    F = expm(C * T)
    W = F[n:, n:].T @ F[:n, n:]
    return Gramian(0.5 * (W + W.T), T)


def gramian_quadrature(A, b, T: float, tol: float = 1e-10, max_depth: int = 30) -> Gramian:
    """Reference Gramian by adaptive Simpson quadrature of the integrand.

    ``tol`` is relative to the Frobenius norm of a coarse Simpson estimate.
    """
    A = as_matrix(A)
    n = A.shape[0]
    b = as_vector(b, n)
    T = _check_horizon(T)

    def integrand(s: float) -> np.ndarray:
        v = expm(A * s) @ b
        return np.outer(v, v)

    f0, fm, f1 = integrand(0.0), integrand(T / 2), integrand(T)
    whole = (T / 6.0) * (f0 + 4 * fm + f1)
    abs_tol = tol * max(np.linalg.norm(whole), np.finfo(float).tiny)

    def recurse(a, fa, m, fm_, c, fc, est, eps, depth):
        lm, rm = 0.5 * (a + m), 0.5 * (m + c)
        flm, frm = integrand(lm), integrand(rm)
        left = ((m - a) / 6.0) * (fa + 4 * flm + fm_)
        right = ((c - m) / 6.0) * (fm_ + 4 * frm + fc)
        delta = left + right - est
        if depth >= max_depth or np.linalg.norm(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        return (recurse(a, fa, lm, flm, m, fm_, left, eps / 2, depth + 1)
                + recurse(m, fm_, rm, frm, c, fc, right, eps / 2, depth + 1))

    W = recurse(0.0, f0, T / 2, fm, T, f1, whole, abs_tol, 0)
    return Gramian(0.5 * (W + W.T), T)


def _require_cyclic(A: np.ndarray, b: np.ndarray) -> None:
    r = kalman_rank(A, b, DEFAULT_RANK_TOL)
    if r != A.shape[0]:
        raise NonControllableError(f"(A, b) is not controllable: rank {r} < {A.shape[0]}",
                                   rank=r, n=A.shape[0])


def exact_cost(A, b, T: float) -> float:
    """Smallest ``C`` with ``||u_min||_{L^2(0,T)} <= C ||y0||`` for all ``y0``.

    Raises
    ------
    NonControllableError
        If (A, b) is not cyclic.
    IllConditionedError
        If the Cholesky factorization of the Gramian breaks down.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    T = _check_horizon(T)
    _require_cyclic(A, b)
    W = gramian(A, b, T).W
    try:
        L = np.linalg.cholesky(W)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(W))
        raise IllConditionedError(f"Gramian is numerically singular (cond ~ {cond:.3g})",
                                  condition=cond) from exc
    cond = float(np.linalg.cond(W))
    if cond > COND_WARN:
        warnings.warn(f"Gramian condition number {cond:.3g} exceeds {COND_WARN:.0e} at T={T}",
                      RuntimeWarning, stacklevel=2)
    X = scipy.linalg.solve_triangular(L, expm(A * T), lower=True)
    top = jacobi_spectrum(X.T @ X)[-1]
    return float(np.sqrt(max(top, 0.0)))


def kappa(A, T: float) -> float:
    """Cost of the companion pair ``(C, e_n)``; depends on A only through its characteristic polynomial."""
    A = as_matrix(A)
    C = companion(char_poly(A))
    e_n = np.zeros(A.shape[0])
    e_n[-1] = 1.0
    return exact_cost(C, e_n, T)


def factorization_report(A, b, T: float) -> CostReport:
    """Exact cost against the factorized bound ``kappa(T) * ||P(b)^{-1}||``.

    The bound is an upper bound; a ratio above ``1 + 1e-4`` raises.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    exact = exact_cost(A, b, T)
    k = kappa(A, T)
    inv = inverse_norm(A, b)
    bound = k * inv
    ratio = exact / bound
    if ratio > 1.0 + RATIO_SLACK:
        raise FactorizationViolation(f"exact cost exceeds factorized bound: ratio {ratio:.8g}")
    return CostReport(exact, k, inv, bound, ratio)


def blowup_exponent(A, T_grid) -> float:
    """Least-squares slope of ``log kappa(T)`` against ``log T``."""
    T = np.asarray(T_grid, dtype=float).ravel()
    if T.size < 4:
        raise DegenerateGridError("need at least 4 horizons")
    if np.any(~np.isfinite(T)) or np.any(T <= 0):
        raise DegenerateGridError("horizons must be finite and positive")
    if T.max() / T.min() < 10.0:
        raise DegenerateGridError("horizons must span at least one decade")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        logk = np.log([kappa(A, t) for t in T])
    slope, _ = np.polyfit(np.log(T), logk, 1)
    return float(slope)
