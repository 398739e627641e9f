"""Optimal single-input actuators through the Brunovsky normal form."""

from .brunovsky import BrunovskyMap, basis_matrix, companion, gram, inverse_norm, verify_brunovsky
from .cost_oracle import exact_cost, factorization_report, gramian, kappa
from .matrix_core import char_poly, is_cyclic, kalman_matrix
from .optimizer import DEConfig, OptimizationResult, differential_evolution, optimize
from .spectral import jacobi_spectrum, objective, smallest_eig_shifted
from .systems import SystemSpec

__all__ = [
    "BrunovskyMap",
    "DEConfig",
    "OptimizationResult",
    "SystemSpec",
    "basis_matrix",
    "char_poly",
    "companion",
    "differential_evolution",
    "exact_cost",
    "factorization_report",
    "gram",
    "gramian",
    "inverse_norm",
    "is_cyclic",
    "jacobi_spectrum",
    "kalman_matrix",
    "kappa",
    "objective",
    "optimize",
    "smallest_eig_shifted",
    "verify_brunovsky",
]
