"""Symmetric eigenvalue routines.

The production path for the smallest eigenvalue is a two-stage power
iteration: find ``lambda_max`` of ``M``, then the dominant eigenvalue ``mu`` of
``lambda_max * I - M``; ``lambda_1 = lambda_max - mu``. A cyclic Jacobi solver
gives the full spectrum and serves as the reference.

All iterative kernels operate on stacks ``(N, n, n)``. Each matrix in a stack
follows its own trajectory and is frozen once converged, so a value never
depends on which other matrices share the batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidInputError
from .matrix_core import as_matrix, as_vector

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 50_000
UNIT_NORM_TOL = 1e-9
DEFAULT_SQUARINGS = 64
SQUARING_TOL = 1e-14


@dataclass(frozen=True)
class EigResult:
    value: float
    vector: np.ndarray
    iterations: int
    converged: bool


def _start_vector(n: int, seed: int) -> np.ndarray:
    v = np.random.default_rng(seed).standard_normal(n)
    return v / np.linalg.norm(v)


def _as_stack(Ms) -> np.ndarray:
    S = np.asarray(Ms, dtype=float)
    if S.ndim == 2:
        S = S[None]
    if S.ndim != 3 or S.shape[1] != S.shape[2]:
        raise DimensionError(f"expected a stack of square matrices, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidInputError("matrix contains NaN or Inf entries")
    return S


def _matvec(Ms: np.ndarray, X: np.ndarray) -> np.ndarray:
    return (Ms @ X[:, :, None])[:, :, 0]


def _squared_powers(Ms: np.ndarray, max_squarings: int) -> np.ndarray:
    """Frobenius-normalized ``M^(2^k)`` for each matrix in the stack.

    Squaring stops per matrix once the normalized power no longer changes
    (it has become the projector onto the dominant eigenspace) or after
    ``max_squarings`` steps.
    """
    nrm = np.linalg.norm(Ms, axis=(1, 2))
    T = Ms / np.where(nrm > 0.0, nrm, 1.0)[:, None, None]
    active = np.flatnonzero(nrm > 0.0)
    for _ in range(max_squarings):
        if active.size == 0:
            break
        S = T[active] @ T[active]
        ns = np.linalg.norm(S, axis=(1, 2))
        S = S / np.where(ns > 0.0, ns, 1.0)[:, None, None]
        delta = np.linalg.norm(S - T[active], axis=(1, 2))
        T[active] = S
        active = active[(delta > SQUARING_TOL) & (ns > 0.0)]
    return T


def power_largest_batch(Ms, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                        seed: int = 0, squarings: int = DEFAULT_SQUARINGS):
    """Dominant eigenpair of every matrix in a stack of symmetric PSD matrices.

    Each step applies ``M^(2^k)`` (formed by normalized repeated squaring,
    ``k <= squarings`` chosen per matrix) to the iterate, so the contamination
    from the second eigenvalue shrinks by ``r^(2^k)`` per step instead of
    ``r``. This matters for the shifted stage, where ``r`` can be within
    ``1e-10`` of one. The Rayleigh quotient is always taken with ``M`` itself.
    ``squarings=0`` is the textbook iteration.

    Convergence is declared when successive Rayleigh quotients differ by at
    most ``tol * |lambda|``, the geometric tail ``change * q / (1 - q)`` (``q``
    the ratio of successive changes) is below the same bound, and the
    residual ``||Mx - lambda x||`` is at most ``tol * ||M||_F``. While the
    quotient has settled but the residual is still large and shrinking, the
    iteration simply continues. If the residual stops shrinking, it restarts
    once from the start vector of ``seed + 1``; a second stall ends the
    iteration with ``converged=False``.

    Returns
    -------
    values, vectors, iterations, converged : ndarray
        Shapes ``(N,)``, ``(N, n)``, ``(N,)``, ``(N,)``.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    Ms = _as_stack(Ms)
    N, n, _ = Ms.shape
    # exact power-of-two rescaling keeps norms clear of under- and overflow
    peak = np.abs(Ms).max(axis=(1, 2))
    scale = np.where(peak > 0.0, np.ldexp(1.0, np.frexp(peak)[1]), 1.0)
    Ms = Ms / scale[:, None, None]
    Ts = _squared_powers(Ms, squarings) if squarings > 0 else Ms
    x0 = _start_vector(n, seed)
    x1 = _start_vector(n, seed + 1)
    res_tol = tol * np.linalg.norm(Ms, axis=(1, 2))

    X = np.tile(x0, (N, 1))
    lam = np.einsum("ij,ij->i", X, _matvec(Ms, X))
    prev_change = np.full(N, np.inf)
    prev_resid = np.full(N, np.inf)
    iters = np.zeros(N, dtype=int)
    restarted = np.zeros(N, dtype=bool)
    converged = np.zeros(N, dtype=bool)
    active = np.arange(N)

    for _ in range(max_iter):
        if active.size == 0:
            break
        Z = _matvec(Ts[active], X[active])
        nz = np.linalg.norm(Z, axis=1)
        null = nz == 0.0
        if np.any(null):
            # iterate lies in the null space
            idx = active[null]
            fresh = idx[~restarted[idx]]
            stale = idx[restarted[idx]]
            restarted[fresh] = True
            X[fresh] = x1
            lam[fresh] = np.einsum("ij,ij->i", X[fresh], _matvec(Ms[fresh], X[fresh]))
            prev_change[fresh] = np.inf
            lam[stale] = 0.0
            converged[stale] = True
            active = np.union1d(active[~null], fresh)
            continue
        iters[active] += 1
        Xa = Z / nz[:, None]
        Ya = _matvec(Ms[active], Xa)
        lam_new = np.einsum("ij,ij->i", Xa, Ya)
        change = np.abs(lam_new - lam[active])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = change / prev_change[active]
            tail = np.where(q < 1.0, change * q / (1.0 - q), np.inf)
        prev_change[active] = change
        X[active] = Xa
        lam[active] = lam_new

        bound = tol * np.abs(lam_new)
        settled = (change <= bound) & ((tail <= bound) | (change == 0.0))
        if not np.any(settled):
            continue
        cand = active[settled]
        resid = np.linalg.norm(Ya[settled] - lam_new[settled, None] * Xa[settled], axis=1)
        good = resid <= res_tol[cand]
        converged[cand[good]] = True
        # the quotient settles quadratically, the vector only linearly: keep
        # iterating while the residual still shrinks
        progressing = ~good & (resid < prev_resid[cand])
        prev_resid[cand] = resid
        stalled = cand[~good & ~progressing]
        fresh = stalled[~restarted[stalled]]
        if fresh.size:
            restarted[fresh] = True
            X[fresh] = x1
            lam[fresh] = np.einsum("ij,ij->i", X[fresh], _matvec(Ms[fresh], X[fresh]))
            prev_change[fresh] = np.inf
            prev_resid[fresh] = np.inf
        done = np.concatenate([cand[good], stalled[restarted[stalled] & ~np.isin(stalled, fresh)]])
        active = active[~np.isin(active, done)]

    return lam * scale, X, iters, converged


def smallest_eig_shifted_batch(Ms, tol: float = DEFAULT_TOL,
                               max_iter: int = DEFAULT_MAX_ITER, seed: int = 0,
                               squarings: int = DEFAULT_SQUARINGS):
    """Smallest eigenvalue of each matrix via the spectral shift.

    Returns ``(values, vectors, iterations, converged, lambda_max)``.
    """
    Ms = _as_stack(Ms)
    n = Ms.shape[1]
    lmax, _, it1, c1 = power_largest_batch(Ms, tol, max_iter, seed, squarings)
    shifted = lmax[:, None, None] * np.eye(n) - Ms
    mu, vec, it2, c2 = power_largest_batch(shifted, tol, max_iter, seed, squarings)
    return lmax - mu, vec, it1 + it2, c1 & c2, lmax


def power_largest(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                  seed: int = 0) -> EigResult:
    """Dominant eigenpair of a symmetric PSD matrix by power iteration."""
    M = as_matrix(M, "M")
    v, X, it, c = power_largest_batch(M, tol, max_iter, seed)
    return EigResult(float(v[0]), X[0], int(it[0]), bool(c[0]))


def smallest_eig_shifted(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                         seed: int = 0) -> EigResult:
    """Smallest eigenvalue of a symmetric PSD matrix.

    >>> round(smallest_eig_shifted([[5.0, 2.0], [2.0, 1.0]]).value, 6)
    0.171573
    """
    M = as_matrix(M, "M")
    v, X, it, c, _ = smallest_eig_shifted_batch(M, tol, max_iter, seed)
    return EigResult(float(v[0]), X[0], int(it[0]), bool(c[0]))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of ``0..n-1`` in which every pair meets exactly once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_spectrum(M, rel_tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """All eigenvalues, ascending, by cyclic Jacobi rotations.

    Accepts a single symmetric matrix or a stack ``(N, n, n)``; the input is
    symmetrized first. Each sweep visits every off-diagonal pair once, in
    round-robin order so that the ``n/2`` rotations of a round act on
    disjoint index pairs and are applied together. Sweeps stop once the
    off-diagonal Frobenius norm is at most ``rel_tol * ||M||_F``.
    """
    single = np.asarray(M).ndim == 2
    S = _as_stack(M).copy()
    S = 0.5 * (S + np.swapaxes(S, 1, 2))
    N, n, _ = S.shape
    target = rel_tol * np.linalg.norm(S, axis=(1, 2))
    offmask = ~np.eye(n, dtype=bool)
    rounds = _round_robin(n)
    eye = np.eye(n)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(S[:, offmask] ** 2, axis=1))
        todo = np.flatnonzero(off > target)
        if todo.size == 0:
            break
        T = S[todo]
        for p, q in rounds:
            if p.size == 0:
                continue
            apq = T[:, p, q]
            app = T[:, p, p]
            aqq = T[:, q, q]
            rot = apq != 0.0
            safe = np.where(rot, apq, 1.0)
            theta = (aqq - app) / (2.0 * safe)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(rot, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            sn = t * c
            J = np.broadcast_to(eye, T.shape).copy()
            J[:, p, p] = c
            J[:, q, q] = c
            J[:, p, q] = sn
            J[:, q, p] = -sn
            T = np.swapaxes(J, 1, 2) @ T @ J
            T[:, p, q] = np.where(rot, 0.0, T[:, p, q])
            T[:, q, p] = T[:, p, q]
        S[todo] = T

    eig = np.sort(np.diagonal(S, axis1=1, axis2=2), axis=1)
    return eig[0] if single else eig


def objective(A, b, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
              seed: int = 0) -> float:
    """``lambda_1(P(b) P(b)^T)`` for a unit actuator ``b``; zero when (A, b) is not cyclic."""
    from .brunovsky import BrunovskyMap

    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    if abs(np.linalg.norm(b) - 1.0) > UNIT_NORM_TOL:
        raise InvalidInputError("objective expects a unit vector; project b first")
    return float(ObjectiveEvaluator(BrunovskyMap(A), tol, max_iter, seed)(b[None])[0])


class ObjectiveEvaluator:
    """Vectorized ``b -> lambda_1(M(b))`` for a fixed dynamics matrix.

    ``embedding`` (shape ``(N, m)``) maps the optimization variable into the
    state space, e.g. ``[0; I]`` for a second-order system actuated through
    the velocity block.
    """

    def __init__(self, bmap, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                 seed: int = 0, embedding=None):
        self.bmap = bmap
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed
        self.embedding = None if embedding is None else np.asarray(embedding, dtype=float)

    @property
    def dim(self) -> int:
        return self.bmap.n if self.embedding is None else self.embedding.shape[1]

    def lift(self, B) -> np.ndarray:
        B = np.atleast_2d(np.asarray(B, dtype=float))
        return B if self.embedding is None else B @ self.embedding.T

    def evaluate(self, B):
        """Return ``(lambda_1, lambda_max, converged)`` for each row of ``B``."""
        grams = self.bmap.gram_batch(self.lift(B))
        lam, _, _, conv, lmax = smallest_eig_shifted_batch(grams, self.tol, self.max_iter,
                                                           self.seed)
        return np.maximum(lam, 0.0), lmax, conv

    def __call__(self, B) -> np.ndarray:
        return self.evaluate(B)[0]
