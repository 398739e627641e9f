"""Maximization of ``b -> lambda_1(M(b))`` over the unit sphere.

The search is a DE/rand/1/bin differential evolution in which every trial
vector is projected back onto the sphere before it is scored. All random
numbers are drawn in a fixed order on the calling thread; scoring may be
split across worker threads without changing any result.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .brunovsky import BrunovskyMap
from .errors import (
    DimensionError,
    InvalidInputError,
    InvalidSymmetryError,
    NoControllableDirectionError,
    ResampleDirection,
)
from .matrix_core import as_matrix, as_vector
from .spectral import ObjectiveEvaluator

MIN_NORM = 1e-300
VANISHING = 1e-12
ORBIT_DEDUP = 1e-8

SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]])
HEAT2_SYMMETRIES = (-np.eye(2), SWAP2, -SWAP2)


@dataclass(frozen=True)
class DEConfig:
    """Differential evolution settings.

    ``population_size`` and ``max_generations`` default to ``15 d`` and
    ``300 d`` for a ``d``-dimensional actuator when left as ``None``.
    """

    population_size: int | None = None
    F: float = 0.8
    CR: float = 0.9
    max_generations: int | None = None
    stall_tolerance: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.F <= 2.0:
            raise InvalidInputError(f"F must lie in (0, 2], got {self.F}")
        if not 0.0 <= self.CR <= 1.0:
            raise InvalidInputError(f"CR must lie in [0, 1], got {self.CR}")
        if self.population_size is not None and self.population_size < 4:
            raise InvalidInputError("population_size must be at least 4")
        if self.max_generations is not None and self.max_generations < 0:
            raise InvalidInputError("max_generations must be non-negative")

    def resolved(self, dim: int) -> "DEConfig":
        return replace(
            self,
            population_size=self.population_size or 15 * dim,
            max_generations=300 * dim if self.max_generations is None else self.max_generations,
        )


@dataclass
class OptimizationResult:
    best_b: np.ndarray
    best_value: float
    generations: int
    evaluations: int
    seed: int
    history: list = field(default_factory=list)
    orbit: list = field(default_factory=list)
    starts: int = 1


def project_to_sphere(v) -> np.ndarray:
    """``v / ||v||``.

    Raises
    ------
    ResampleDirection
        If ``||v|| < 1e-300``; the caller should draw a fresh direction.
    """
    v = np.asarray(v, dtype=float)
    nrm = float(np.linalg.norm(v))
    if not nrm >= MIN_NORM:
        raise ResampleDirection("vector too short to normalize")
    return v / nrm


def canonical_sign(b: np.ndarray) -> np.ndarray:
    """Flip ``b`` so that its largest-magnitude entry is positive."""
    return -b if b[int(np.argmax(np.abs(b)))] < 0 else b


def _random_direction(rng: np.random.Generator, dim: int) -> np.ndarray:
    while True:
        try:
            return project_to_sphere(rng.standard_normal(dim))
        except ResampleDirection:
            continue


def parallel_evaluate(evaluator: ObjectiveEvaluator, B: np.ndarray, workers: int = 1,
                      chunk: int | None = None):
    """``(lambda_1, lambda_max)`` for each row of ``B``, split over threads.

    Every matrix is solved independently of its neighbours, so the result
    does not depend on ``workers`` or ``chunk``.
    """
    workers = max(1, int(workers))
    n_chunks = max(workers, 1 if chunk is None else -(-B.shape[0] // chunk))
    chunks = np.array_split(B, min(n_chunks, max(B.shape[0], 1)))
    if workers == 1 or len(chunks) == 1:
        parts = [evaluator.evaluate(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(evaluator.evaluate, chunks))
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]))


class _Scorer:
    def __init__(self, evaluator: ObjectiveEvaluator, workers: int):
        self.evaluator = evaluator
        self.workers = workers
        self.count = 0

    def __call__(self, B: np.ndarray):
        self.count += B.shape[0]
        return parallel_evaluate(self.evaluator, B, self.workers)


def _make_evaluator(A, embedding) -> ObjectiveEvaluator:
    A = as_matrix(A)
    ev = ObjectiveEvaluator(BrunovskyMap(A), embedding=embedding)
    if ev.embedding is not None and ev.embedding.shape[0] != A.shape[0]:
        raise DimensionError("embedding rows must match the state dimension")
    return ev


def differential_evolution(A, cfg: DEConfig | None = None, *, embedding=None,
                           workers: int = 1) -> OptimizationResult:
    """One DE/rand/1/bin run maximizing ``lambda_1(M(b))`` on the unit sphere.

    Stops after ``max_generations`` or once the standard deviation of the
    population's objective values falls below ``stall_tolerance``.

    Raises
    ------
    NoControllableDirectionError
        If every member of the initial population scores (numerically) zero.
    """
    evaluator = _make_evaluator(A, embedding)
    return _run_de(evaluator, cfg or DEConfig(), workers)


def _run_de(evaluator: ObjectiveEvaluator, cfg: DEConfig, workers: int) -> OptimizationResult:
    dim = evaluator.dim
    cfg = cfg.resolved(dim)
    NP = cfg.population_size
    rng = np.random.default_rng(cfg.seed)
    score = _Scorer(evaluator, workers)

    pop = np.array([_random_direction(rng, dim) for _ in range(NP)])
    fit, lmax = score(pop)
    if np.all(fit <= VANISHING * np.maximum(1.0, lmax)):
        raise NoControllableDirectionError(
            "objective vanishes on the whole initial population; A may have no cyclic vector"
        )
    history = [float(fit.max())]
    generations = 0
    trials = np.empty_like(pop)

    while generations < cfg.max_generations and np.std(fit) >= cfg.stall_tolerance:
        for i in range(NP):
            r = rng.choice(NP - 1, size=3, replace=False)
            r[r >= i] += 1
            mutant = pop[r[0]] + cfg.F * (pop[r[1]] - pop[r[2]])
            cross = rng.random(dim) < cfg.CR
            cross[rng.integers(dim)] = True
            try:
                trials[i] = project_to_sphere(np.where(cross, mutant, pop[i]))
            except ResampleDirection:
                trials[i] = _random_direction(rng, dim)
        trial_fit, _ = score(trials)
        better = trial_fit >= fit
        pop[better] = trials[better]
        fit[better] = trial_fit[better]
        generations += 1
        history.append(float(fit.max()))

    best = int(np.argmax(fit))
    return OptimizationResult(
        best_b=canonical_sign(pop[best].copy()),
        best_value=float(fit[best]),
        generations=generations,
        evaluations=score.count,
        seed=cfg.seed,
        history=history,
    )


def optimize(A, cfg: DEConfig | None = None, *, starts: int | None = None, embedding=None,
             workers: int = 1, symmetries=None) -> OptimizationResult:
    """Best of several independently seeded DE runs.

    ``starts`` defaults to 1 for two-dimensional actuators and 4 otherwise.
    Child seeds are spawned from ``cfg.seed``. When ``symmetries`` are given,
    the orbit of the winner under them is attached to the result.
    """
    cfg = cfg or DEConfig()
    evaluator = _make_evaluator(A, embedding)
    if starts is None:
        starts = 1 if evaluator.dim == 2 else 4
    if starts < 1:
        raise InvalidInputError("starts must be at least 1")
    if starts == 1:
        seeds = [cfg.seed]
    else:
        children = np.random.SeedSequence(cfg.seed).spawn(starts)
        seeds = [int(c.generate_state(1)[0]) for c in children]

    runs = [_run_de(evaluator, replace(cfg, seed=s), workers) for s in seeds]
    best = max(runs, key=lambda r: r.best_value)
    best.seed = cfg.seed
    best.starts = starts
    best.evaluations = sum(r.evaluations for r in runs)
    if symmetries is not None:
        A = as_matrix(A)
        best.orbit = symmetry_orbit(A, best.best_b, symmetries)
    return best


def commutes_and_orthogonal(A, R, tol: float = 1e-10) -> bool:
    """``||AR - RA|| <= tol ||A|| ||R||`` and ``||R R^T - I|| <= tol`` (Frobenius)."""
    A = as_matrix(A)
    R = as_matrix(R, "R")
    if R.shape != A.shape:
        raise DimensionError(f"R has shape {R.shape}, expected {A.shape}")
    comm = np.linalg.norm(A @ R - R @ A) <= tol * np.linalg.norm(A) * np.linalg.norm(R)
    orth = np.linalg.norm(R @ R.T - np.eye(R.shape[0])) <= tol
    return bool(comm and orth)


def symmetry_orbit(A, b, candidates, tol: float = 1e-10) -> list[np.ndarray]:
    """``{b} U {R b}`` over the candidates, with near-duplicates removed.

    Every candidate must be an orthogonal matrix commuting with ``A``.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    orbit = [b.copy()]
    for idx, R in enumerate(candidates):
        if not commutes_and_orthogonal(A, R, tol):
            raise InvalidSymmetryError(f"candidate {idx} is not an orthogonal commutant of A", idx)
        image = np.asarray(R, dtype=float) @ b
        if all(np.linalg.norm(image - o) >= ORBIT_DEDUP for o in orbit):
            orbit.append(image)
    return orbit


def fd_gradient(A, b, eps: float = 1e-6, embedding=None) -> np.ndarray:
    """Central differences of ``b -> lambda_1(M(b / ||b||))``.

    Diagnostic only. Near an eigenvalue crossing ``lambda_1`` is not
    differentiable and the values are noisy.
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive")
    evaluator = _make_evaluator(A, embedding)
    b = as_vector(b, evaluator.dim)
    steps = eps * np.eye(b.size)
    points = np.vstack([b + steps, b - steps])
    points /= np.linalg.norm(points, axis=1)[:, None]
    vals = evaluator(points)
    return (vals[: b.size] - vals[b.size:]) / (2.0 * eps)
