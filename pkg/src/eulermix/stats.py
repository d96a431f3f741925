"""Small estimators shared by the Monte Carlo and scaling experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    replicas: int

    def upper(self, sigmas: float = 3.0) -> float:
        return self.mean + sigmas * self.stderr


def estimate(samples) -> Estimate:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        return Estimate(float(x.mean()) if x.size else float("nan"), 0.0, int(x.size))
    return Estimate(float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size)), int(x.size))


def pooled(parts: list[tuple[float, float, int]]) -> Estimate:
    """Combine per-block ``(sum, sum_sq, count)`` triples."""
    s = sum(p[0] for p in parts)
    ss = sum(p[1] for p in parts)
    k = sum(p[2] for p in parts)
    mean = s / k
    var = max(ss / k - mean * mean, 0.0) * k / max(k - 1, 1)
    return Estimate(mean, float(np.sqrt(var / k)), k)


def fit_exponent(xs, ys) -> tuple[float, float]:
    """Least-squares slope and prefactor of ``y ~ C x^slope`` on log-log axes."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    slope, icept = np.polyfit(lx, ly, 1)
    return float(slope), float(np.exp(icept))
