"""Atkinson resource welfare, nutrition-weighted combined welfare, head-count poverty ratio."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from foodbank.model import WEIGHT_SUM_TOL


@dataclass(frozen=True)
class WelfareReport:
    per_type: tuple[float, ...]
    combined: float


def atkinson_rows(residuals: np.ndarray, epsilon: float) -> np.ndarray:
    """Atkinson equally-distributed-equivalent value along the last axis.

    No input checking; callers guarantee ``residuals >= 0`` and ``epsilon >= 0``.
    Rows are normalised (by the maximum for epsilon <= 1, by the minimum above
    1, so powers never overflow) and the power mean is evaluated in log space
    with ``expm1``/``log1p`` so that epsilon close to 1 stays accurate.  A row
    containing a zero gives 0 whenever ``epsilon >= 1``.
    """
    r = np.asarray(residuals, dtype=float)
    if epsilon == 0:
        return r.mean(axis=-1)
    top = r.max(axis=-1)
    has_zero = (r <= 0).any(axis=-1)
    ref = r.min(axis=-1) if epsilon > 1 else top
    ref = np.where(ref > 0, ref, 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        logs = np.log(r / ref[..., None])  # -inf at zeros
        if epsilon == 1:
            value = ref * np.exp(logs.mean(axis=-1))
        else:
            a = 1.0 - epsilon
            # mean(x**a) - 1 without cancellation
            m1 = np.expm1(a * logs).mean(axis=-1)
            value = ref * np.exp(np.log1p(m1) / a)
    if epsilon >= 1:
        value = np.where(has_zero, 0.0, value)
    return np.where(top > 0, value, 0.0)


def atkinson_welfare(residuals: Sequence[float], epsilon: float) -> float:
    """Resource welfare of one food type: the Atkinson power mean of donor residuals.

    Returns ``[mean(r ** (1 - eps))] ** (1 / (1 - eps))``, the geometric mean at
    ``eps == 1``, and 0 when some residual is 0 and ``eps >= 1``.

    >>> atkinson_welfare([10, 20, 30], 0)
    20.0
    >>> round(atkinson_welfare([4, 9], 1), 12)
    6.0
    """
    r = np.asarray(residuals, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("residuals must be a nonempty 1-D vector")
    if not np.all(np.isfinite(r)) or (r < 0).any():
        raise ValueError("residuals must be finite and >= 0")
    if not (math.isfinite(epsilon) and epsilon >= 0):
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    return float(atkinson_rows(r, float(epsilon)))


def combined_welfare(per_type_welfare: Sequence[float], weights: Sequence[float]) -> float:
    """Nutrition-weighted sum of per-type welfare values."""
    if len(per_type_welfare) != len(weights) or not weights:
        raise ValueError(
            f"length mismatch: {len(per_type_welfare)} welfare values vs {len(weights)} weights"
        )
    if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"weights must sum to 1, got {math.fsum(weights)!r}")
    return math.fsum(w * r for w, r in zip(weights, per_type_welfare))


def welfare_report(residuals: np.ndarray, epsilon: Sequence[float], weights: Sequence[float]) -> WelfareReport:
    """Per-type and combined welfare of a (donors x types) residual matrix."""
    r = np.asarray(residuals, dtype=float)
    per_type = tuple(atkinson_welfare(r[:, x], epsilon[x]) for x in range(r.shape[1]))
    return WelfareReport(per_type, combined_welfare(per_type, weights))


def head_count_ratio(poor: int, total: int) -> float:
    """Share of a region's population below the poverty line."""
    if total < 1:
        raise ValueError(f"population must be >= 1, got {total}")
    if poor < 0 or poor > total:
        raise ValueError(f"poor count {poor} must lie in [0, {total}]")
    return poor / total
