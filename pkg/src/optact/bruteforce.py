"""Grid and sampling oracles for the objective on low-dimensional spheres.

These do not use the power iteration. Two-by-two Gram matrices are solved in
closed form and larger ones with the Jacobi solver, so the oracles are
independent of the production eigenvalue path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .brunovsky import BrunovskyMap
from .errors import InvalidInputError, UnsupportedDimensionError
from .matrix_core import as_matrix
from .spectral import jacobi_spectrum

CHUNK = 100_000


@dataclass(frozen=True)
class GridMax:
    value: float
    b: np.ndarray
    samples: int


def lambda1_2x2(M: np.ndarray) -> np.ndarray:
    """Smaller eigenvalue of each symmetric 2x2 matrix in a stack."""
    a, c, off = M[:, 0, 0], M[:, 1, 1], M[:, 0, 1]
    return 0.5 * (a + c) - np.hypot(0.5 * (a - c), off)


class _Lambda1:
    def __init__(self, A, embedding=None):
        self.bmap = BrunovskyMap(as_matrix(A))
        self.E = None if embedding is None else np.asarray(embedding, dtype=float)

    @property
    def dim(self) -> int:
        return self.bmap.n if self.E is None else self.E.shape[1]

    def __call__(self, B: np.ndarray) -> np.ndarray:
        out = np.empty(B.shape[0])
        for start in range(0, B.shape[0], CHUNK):
            part = B[start:start + CHUNK]
            if self.E is not None:
                part = part @ self.E.T
            G = self.bmap.gram_batch(part)
            lam = lambda1_2x2(G) if G.shape[1] == 2 else jacobi_spectrum(G)[:, 0]
            out[start:start + CHUNK] = np.maximum(lam, 0.0)
        return out


def circle_points(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """``theta_i = 2 pi i / r`` and the points ``(cos, sin)``."""
    theta = 2.0 * np.pi * np.arange(resolution) / resolution
    return theta, np.column_stack([np.cos(theta), np.sin(theta)])


def sphere_grid(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Latitude-longitude grid: polar ``pi i / r`` and azimuth ``2 pi j / r``.

    Returns the ``(r^2, 2)`` angle pairs and the ``(r^2, 3)`` points. Grids at
    ``r`` and ``2r`` are nested.
    """
    i, j = np.meshgrid(np.arange(resolution), np.arange(resolution), indexing="ij")
    polar = (np.pi * i / resolution).ravel()
    azim = (2.0 * np.pi * j / resolution).ravel()
    pts = np.column_stack([np.sin(polar) * np.cos(azim),
                           np.sin(polar) * np.sin(azim),
                           np.cos(polar)])
    return np.column_stack([polar, azim]), pts


def fibonacci_sphere(count: int) -> np.ndarray:
    """Quasi-uniform points on the unit sphere in R^3."""
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def evaluate(A, B, embedding=None) -> np.ndarray:
    """Objective at each row of ``B`` (assumed unit) using the oracle eigensolvers."""
    return _Lambda1(A, embedding)(np.atleast_2d(np.asarray(B, dtype=float)))


def circle_max(A, points: int = 1_000_000, embedding=None, refine: bool = True) -> GridMax:
    """Maximum over a uniform theta grid, polished by a bounded scalar search."""
    f = _Lambda1(A, embedding)
    if f.dim != 2:
        raise UnsupportedDimensionError("circle grid needs a two-dimensional actuator")
    if points < 8:
        raise InvalidInputError("need at least 8 grid points")
    theta, B = circle_points(points)
    vals = f(B)
    k = int(np.argmax(vals))
    best_t, best_v = theta[k], float(vals[k])
    if refine:
        step = 2.0 * np.pi / points
        res = minimize_scalar(lambda t: -f(np.array([[np.cos(t), np.sin(t)]]))[0],
                              bounds=(best_t - step, best_t + step), method="bounded",
                              options={"xatol": 1e-13})
        if -res.fun > best_v:
            best_t, best_v = float(res.x), float(-res.fun)
    return GridMax(best_v, np.array([np.cos(best_t), np.sin(best_t)]), points)


def sphere_max(A, samples: int = 2_000_000, embedding=None, polish: int = 16) -> GridMax:
    """Maximum over Fibonacci samples on S^2, then Nelder-Mead from the best ``polish`` points."""
    f = _Lambda1(A, embedding)
    if f.dim != 3:
        raise UnsupportedDimensionError("sphere sampling needs a three-dimensional actuator")
    B = fibonacci_sphere(samples)
    vals = f(B)
    order = np.argsort(vals)[::-1]
    seeds: list[np.ndarray] = []
    spacing = np.sqrt(4.0 * np.pi / samples)
    for idx in order:
        b = B[idx]
        # skip near-duplicates and antipodes of points already kept
        if all(min(np.linalg.norm(b - s), np.linalg.norm(b + s)) > 10 * spacing for s in seeds):
            seeds.append(b)
        if len(seeds) >= polish:
            break

    def neg(x):
        nrm = np.linalg.norm(x)
        return np.inf if nrm < 1e-12 else -f((x / nrm)[None])[0]

    best_v, best_b = float(vals[order[0]]), B[order[0]]
    for s in seeds:
        res = minimize(neg, s, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000,
                                "initial_simplex": s + 2 * spacing * np.vstack([np.zeros(3), np.eye(3)])})
        if -res.fun > best_v:
            best_v, best_b = float(-res.fun), res.x / np.linalg.norm(res.x)
    return GridMax(best_v, best_b, samples)
