"""Finite-difference dynamics used as test systems.

Grid spacing is ``h = 1 / (n - 1)`` for ``n`` grid points. With
``scaling="none"`` the stencils are used as-is (``h`` treated as 1); with
``scaling="h2"`` the diffusion part carries ``1/h^2`` and the advection part
``1/(2h)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, UnsupportedDimensionError
from .matrix_core import as_matrix

KINDS = ("heat", "wave", "advection-plus", "advection-minus", "custom")
SCALINGS = ("none", "h2")


def _check_n(n: int) -> None:
    if n < 2:
        raise UnsupportedDimensionError(f"need at least 2 grid points, got {n}")


def _check_scaling(scaling: str) -> None:
    if scaling not in SCALINGS:
        raise InvalidInputError(f"scaling must be one of {SCALINGS}, got {scaling!r}")


def grid_step(n: int) -> float:
    _check_n(n)
    return 1.0 / (n - 1)


def dirichlet_laplacian(n: int, scaling: str = "none") -> np.ndarray:
    """Tridiagonal ``(1, -2, 1)``, times ``1/h^2`` when ``scaling="h2"``."""
    _check_n(n)
    _check_scaling(scaling)
    L = -2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)
    if scaling == "h2":
        L /= grid_step(n) ** 2
    return L


def laplacian_eigs(n: int, h: float) -> np.ndarray:
    """``-(4/h^2) sin^2(pi j / (2(n+1)))`` for ``j = 1..n``, ascending."""
    _check_n(n)
    if h <= 0:
        raise InvalidInputError("h must be positive")
    j = np.arange(1, n + 1)
    return np.sort(-(4.0 / h ** 2) * np.sin(np.pi * j / (2 * (n + 1))) ** 2)


def wave_dynamics(n: int, scaling: str = "none") -> np.ndarray:
    """First-order form ``[[0, I], [L, 0]]`` of the discrete wave equation (size 2n)."""
    L = dirichlet_laplacian(n, scaling)
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = np.eye(n)
    A[n:, :n] = L
    return A


def advection_diffusion(n: int, sign: int = 1, scaling: str = "none") -> np.ndarray:
    """Laplacian plus centered advection; ``sign=+1`` puts ``+1/(2h)`` on the superdiagonal.

    >>> advection_diffusion(2, +1).tolist()
    [[-2.0, 1.5], [0.5, -2.0]]
    """
    if sign not in (1, -1):
        raise InvalidInputError("sign must be +1 or -1")
    L = dirichlet_laplacian(n, scaling)
    h = grid_step(n) if scaling == "h2" else 1.0
    skew = sign * (np.eye(n, k=1) - np.eye(n, k=-1)) / (2.0 * h)
    return L + skew


def load_matrix(path) -> np.ndarray:
    """Square matrix from a headerless CSV file, one row per line."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"matrix file not found: {path}")
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse {path}: {exc}") from exc
    return as_matrix(M, "matrix")


@dataclass(frozen=True)
class SystemSpec:
    """Named test system.

    ``n`` is the number of grid points; for ``kind="wave"`` the state has
    dimension ``2n`` and the actuator acts on the velocity block only.
    """

    kind: str
    n: int = 2
    scaling: str = "none"
    matrix_path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"kind must be one of {KINDS}, got {self.kind!r}")
        _check_scaling(self.scaling)
        if self.kind == "custom":
            if self.matrix_path is None:
                raise InvalidInputError("custom systems need a matrix file")
        else:
            _check_n(self.n)

    def dynamics(self) -> np.ndarray:
        if self.kind == "heat":
            return dirichlet_laplacian(self.n, self.scaling)
        if self.kind == "wave":
            return wave_dynamics(self.n, self.scaling)
        if self.kind == "advection-plus":
            return advection_diffusion(self.n, +1, self.scaling)
        if self.kind == "advection-minus":
            return advection_diffusion(self.n, -1, self.scaling)
        A = load_matrix(self.matrix_path)
        _check_n(A.shape[0])
        return A

    def embedding(self) -> np.ndarray | None:
        """Map from actuator coordinates into the state, or ``None`` for the identity."""
        if self.kind != "wave":
            return None
        E = np.zeros((2 * self.n, self.n))
        E[self.n:, :] = np.eye(self.n)
        return E

    @property
    def actuator_dim(self) -> int:
        if self.kind == "custom":
            return self.dynamics().shape[0]
        return self.n
