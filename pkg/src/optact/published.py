"""Previously reported optima, kept for side-by-side comparison in reports.

These numbers are not used as ground truth anywhere: brute-force grids are.
Some of them do not agree with the closed-form objective; the comparison
block in each report shows the measured gap.
"""

from __future__ import annotations

import numpy as np

from .spectral import ObjectiveEvaluator
from .brunovsky import BrunovskyMap

HEAT2_VALUE = 0.24913
HEAT2_MAXIMIZERS = ((-0.257983, 0.96614944), (0.257983, -0.96614944),
                    (0.96614944, -0.257983), (-0.96614944, 0.257983))

HEAT3_VALUE = 0.0399
HEAT3_MAXIMIZERS = ((-0.7633, 0.6325, 0.1311), (-0.1311, 0.6325, -0.7633),
                    (-0.1311, -0.6325, 0.7633), (0.7633, -0.6325, -0.1311))

ADVECTION2_VALUE = 0.32236
ADVECTION2_PLUS_MAXIMIZERS = ((-0.9548099, 0.296895), (0.9548099, -0.296895))
ADVECTION2_MINUS_MAXIMIZERS = ((-0.296895, 0.9548099), (0.296895, -0.9548099))


def reference_for(kind: str, n: int) -> tuple[float, tuple] | None:
    """Reported value and maximizers for a named system, or ``None``."""
    if kind in ("heat", "wave") and n == 2:
        return HEAT2_VALUE, HEAT2_MAXIMIZERS
    if kind in ("heat", "wave") and n == 3:
        return HEAT3_VALUE, HEAT3_MAXIMIZERS
    if kind == "advection-plus" and n == 2:
        return ADVECTION2_VALUE, ADVECTION2_PLUS_MAXIMIZERS
    if kind == "advection-minus" and n == 2:
        return ADVECTION2_VALUE, ADVECTION2_MINUS_MAXIMIZERS
    return None


def compare(kind: str, n: int, A, measured: float, embedding=None) -> dict | None:
    """Reported value against ``measured``, plus the objective at each reported maximizer.

    The reported maximizers are rounded, so they are normalized before
    evaluation.
    """
    ref = reference_for(kind, n)
    if ref is None:
        return None
    value, points = ref
    B = np.array(points, dtype=float)
    B /= np.linalg.norm(B, axis=1)[:, None]
    ev = ObjectiveEvaluator(BrunovskyMap(A), embedding=embedding)
    return {
        "reported_value": value,
        "measured_value": measured,
        "difference": measured - value,
        "reported_maximizers": [list(p) for p in points],
        "objective_at_reported_maximizers": [float(v) for v in ev(B)],
    }
