"""Property suites behind the ``verify`` command.

Each suite draws its own seeded samples, measures the worst residual and
compares it with a fixed threshold.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .brunovsky import BrunovskyMap, pk_matrices, verify_brunovsky
from .matrix_core import char_poly, is_cyclic
from .optimizer import HEAT2_SYMMETRIES
from .spectral import ObjectiveEvaluator, jacobi_spectrum, smallest_eig_shifted_batch
from .systems import SystemSpec, dirichlet_laplacian


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    threshold: float
    samples: int

    def as_dict(self) -> dict:
        return asdict(self)


def random_unit(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    B = rng.standard_normal((count, dim))
    return B / np.linalg.norm(B, axis=1)[:, None]


def random_cyclic_pairs(rng: np.random.Generator, count: int, max_n: int = 10):
    """Gaussian pairs ``(A, b)`` with ``2 <= n <= max_n``, unit ``b``, cyclic."""
    pairs = []
    while len(pairs) < count:
        n = int(rng.integers(2, max_n + 1))
        A = rng.standard_normal((n, n))
        b = random_unit(rng, 1, n)[0]
        if is_cyclic(A, b):
            pairs.append((A, b))
    return pairs


def random_spd(rng: np.random.Generator, count: int, max_n: int = 10):
    """``G G^T`` with Gaussian ``G``, sizes ``1..max_n``."""
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        G = rng.standard_normal((n, n))
        out.append(G @ G.T)
    return out


def brunovsky_worst(pairs) -> tuple[float, float]:
    r1 = r2 = 0.0
    for A, b in pairs:
        res = verify_brunovsky(A, b)
        r1 = max(r1, res.intertwining)
        r2 = max(r2, res.last_column)
    return r1, r2


def gram_worst(pairs) -> float:
    worst = 0.0
    for A, b in pairs:
        # reference: sum of rank-one terms from independently built p_k(A)
        ref = sum(np.outer(p @ b, p @ b) for p in pk_matrices(A, char_poly(A)))
        M = BrunovskyMap(A).gram(b)
        worst = max(worst, np.linalg.norm(M - ref) / np.linalg.norm(ref))
    return float(worst)


def oracle_worst(mats) -> float:
    """Largest ``|power - jacobi| / max(1, ||M||_F)`` for the smallest eigenvalue."""
    worst = 0.0
    for M in mats:
        lam = smallest_eig_shifted_batch(M)[0][0]
        ref = jacobi_spectrum(M)[0]
        worst = max(worst, abs(lam - ref) / max(1.0, np.linalg.norm(M)))
    return float(worst)


def wave_heat_worst(rng: np.random.Generator, sizes=range(2, 7), count: int = 100,
                    scaling: str = "none") -> tuple[float, float]:
    """Block residual ``||M_w - diag(M_h, M_h)|| / ||M_w||`` and ``lambda_1`` gap.

    The ``lambda_1`` gap is measured relative to ``||M_w||_F``: for larger
    unscaled grids ``lambda_1 / ||M||`` drops to about ``1e-12``, so a gap
    relative to ``lambda_1`` itself would only measure rounding.
    """
    block = gap = 0.0
    for n in sizes:
        heat = BrunovskyMap(dirichlet_laplacian(n, scaling))
        spec = SystemSpec("wave", n, scaling)
        wave = BrunovskyMap(spec.dynamics())
        B = random_unit(rng, count, n)
        Mh = heat.gram_batch(B)
        Mw = wave.gram_batch(B @ spec.embedding().T)
        ref = np.zeros_like(Mw)
        ref[:, :n, :n] = Mh
        ref[:, n:, n:] = Mh
        rel = np.linalg.norm(Mw - ref, axis=(1, 2)) / np.linalg.norm(Mw, axis=(1, 2))
        block = max(block, float(rel.max()))
        lh = smallest_eig_shifted_batch(Mh)[0]
        lw = smallest_eig_shifted_batch(Mw)[0]
        nw = np.linalg.norm(Mw, axis=(1, 2))
        gap = max(gap, float(np.max(np.abs(lw - lh) / nw)))
    return block, gap


def symmetry_worst(rng: np.random.Generator, count: int = 100) -> float:
    A = dirichlet_laplacian(2)
    ev = ObjectiveEvaluator(BrunovskyMap(A))
    B = random_unit(rng, count, 2)
    base = ev(B)
    return float(max(np.max(np.abs(ev(B @ np.asarray(R).T) - base)) for R in HEAT2_SYMMETRIES))


def run_suites(seed: int = 0, pairs: int = 500, spd: int = 1000, per_size: int = 100) -> list[SuiteResult]:
    """Run every suite and return one result per check."""
    rng = np.random.default_rng(seed)
    cyc = random_cyclic_pairs(rng, pairs)
    r1, r2 = brunovsky_worst(cyc)
    results = [
        SuiteResult("brunovsky-intertwining", r1 <= 1e-8, r1, 1e-8, pairs),
        SuiteResult("brunovsky-last-column", r2 <= 1e-12, r2, 1e-12, pairs),
    ]
    g = gram_worst(cyc)
    results.append(SuiteResult("gram-factorization", g <= 1e-10, g, 1e-10, pairs))
    o = oracle_worst(random_spd(rng, spd))
    results.append(SuiteResult("eigen-oracle-agreement", o <= 1e-8, o, 1e-8, spd))
    block, gap = wave_heat_worst(rng, count=per_size)
    results.append(SuiteResult("wave-heat-block", block <= 1e-9, block, 1e-9, 5 * per_size))
    results.append(SuiteResult("wave-heat-lambda1", gap <= 1e-9, gap, 1e-9, 5 * per_size))
    s = symmetry_worst(rng, per_size)
    results.append(SuiteResult("symmetry-invariance", s <= 1e-10, s, 1e-10, per_size))
    return results
