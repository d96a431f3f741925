"""Distances to stationarity and the threshold times t_mix and t_unif."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .chain import LazyChain

log = logging.getLogger(__name__)

__all__ = [
    "DistanceProfile",
    "ThresholdReport",
    "ThresholdResult",
    "SubmultReport",
    "tv_distance",
    "d1_of",
    "dinf_of",
    "dbar_of",
    "power",
    "distance_profile",
    "threshold_time",
    "thresholds",
    "submultiplicativity_audit",
    "default_cap",
]

METRICS = ("tv", "linf")


@dataclass(frozen=True)
class DistanceProfile:
    times: np.ndarray
    d1: np.ndarray
    dinf: np.ndarray
    dbar: np.ndarray


@dataclass(frozen=True)
class ThresholdResult:
    metric: str
    epsilon: float
    t: int | None
    cap: int

    @property
    def reached(self) -> bool:
        return self.t is not None


@dataclass(frozen=True)
class ThresholdReport:
    epsilon: float
    t_mix: int | None
    t_unif: int | None


@dataclass(frozen=True)
class SubmultReport:
    s: int
    t: int
    lhs: float
    rhs: float
    holds: bool
    rhs_l1: float
    holds_l1: bool


def tv_distance(mu, nu) -> float:
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise ValueError(f"length mismatch: {mu.shape} vs {nu.shape}")
    return 0.5 * float(np.abs(mu - nu).sum())


def d1_of(M: np.ndarray, pi: np.ndarray) -> float:
    """Worst-start total variation of the rows of ``M`` from ``pi``."""
    return 0.5 * float(np.abs(M - pi).sum(axis=1).max())


def dinf_of(M: np.ndarray, pi: np.ndarray) -> float:
    """``max_{x,y} |M(x,y)/pi(y) - 1|``."""
    return float(np.abs(M / pi - 1.0).max())


def dbar_of(M: np.ndarray) -> float:
    """Largest total variation between two rows of ``M``."""
    best = 0.0
    for x in range(M.shape[0] - 1):
        best = max(best, 0.5 * float(np.abs(M[x + 1 :] - M[x]).sum(axis=1).max()))
    return best


_METRIC_FN = {"tv": d1_of, "linf": dinf_of}


def power(c: LazyChain, t: int) -> np.ndarray:
    """Dense ``P^t`` by repeated squaring."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return np.linalg.matrix_power(np.asarray(c.dense), int(t))


def distance_profile(c: LazyChain, times: Sequence[int]) -> DistanceProfile:
    """Exact d1, dinf and dbar at each requested time (every start evolved at once)."""
    ts = np.asarray([int(t) for t in times], dtype=np.int64)
    if ts.size and (np.any(np.diff(ts) <= 0) or ts[0] < 0):
        raise ValueError("times must be strictly increasing and nonnegative")
    P = np.asarray(c.dense)
    M = np.eye(c.n)
    prev = 0
    d1, dinf, dbar = [], [], []
    for t in ts:
        if t > prev:
            M = M @ np.linalg.matrix_power(P, int(t - prev))
            prev = int(t)
        d1.append(d1_of(M, c.pi))
        dinf.append(dinf_of(M, c.pi))
        dbar.append(dbar_of(M))
    return DistanceProfile(ts, np.array(d1), np.array(dinf), np.array(dbar))


def default_cap(n: int) -> int:
    return 64 * n**3


def _check_eps(metric: str, epsilon: float) -> None:
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")


def _squares(c: LazyChain, metrics: Sequence[str], epsilon: float, cap: int) -> list[np.ndarray]:
    """P, P^2, P^4, ... up to the first power where every metric is <= epsilon (or past cap)."""
    out = [np.asarray(c.dense, dtype=float)]
    while any(_METRIC_FN[m](out[-1], c.pi) > epsilon for m in metrics):
        if 2 ** len(out) > cap:
            break
        out.append(out[-1] @ out[-1])
    return out


def _lift(c: LazyChain, squares: list[np.ndarray], metric: str, epsilon: float, cap: int):
    dist = _METRIC_FN[metric]
    pi = c.pi
    if dist(np.eye(c.n), pi) <= epsilon:
        return 0
    top = next((k for k, M in enumerate(squares) if dist(M, pi) <= epsilon), None)
    if top is None:
        log.info("%s threshold %.3g not reached within %d steps", metric, epsilon, cap)
        return None
    # largest t < 2^top with dist(P^t) > eps, assembled bit by bit
    t = 0
    M = None
    for k in range(top - 1, -1, -1):
        cand = squares[k] if M is None else M @ squares[k]
        if dist(cand, pi) > epsilon:
            M = cand
            t += 2**k
    t += 1
    return t if t <= cap else None


def threshold_time(
    c: LazyChain, metric: str = "tv", epsilon: float = 0.25, cap: int | None = None
) -> ThresholdResult:
    """Smallest t with the metric at most ``epsilon``, or ``t=None`` past ``cap``.

    Both metrics are nonincreasing in t: each row of P^{t+1} is a convex combination
    of rows of P^t. That licenses binary lifting over the squares P^{2^k}.
    """
    _check_eps(metric, epsilon)
    cap = default_cap(c.n) if cap is None else int(cap)
    squares = _squares(c, [metric], epsilon, cap)
    return ThresholdResult(metric, epsilon, _lift(c, squares, metric, epsilon, cap), cap)


def thresholds(c: LazyChain, epsilon: float = 0.25, cap: int | None = None) -> ThresholdReport:
    """t_mix and t_unif at ``epsilon`` from one shared ladder of squares."""
    _check_eps("tv", epsilon)
    cap = default_cap(c.n) if cap is None else int(cap)
    squares = _squares(c, METRICS, epsilon, cap)
    return ThresholdReport(
        epsilon,
        _lift(c, squares, "tv", epsilon, cap),
        _lift(c, squares, "linf", epsilon, cap),
    )


def submultiplicativity_audit(c: LazyChain, s: int, t: int) -> SubmultReport:
    """Compare dinf(s+t) with dinf(s)·d1(t), and with the L1 form dinf(s)·2·d1(t)."""
    if s < 0 or t < 0:
        raise ValueError("s and t must be nonnegative")
    Ps = power(c, s)
    Pt = power(c, t)
    lhs = dinf_of(Ps @ Pt, c.pi)
    a = dinf_of(Ps, c.pi)
    b = d1_of(Pt, c.pi)
    tol = 1e-12
    rhs = a * b
    return SubmultReport(s, t, lhs, rhs, lhs <= rhs + tol, 2.0 * rhs, lhs <= 2.0 * rhs + tol)
