"""The two-cycle gadget: diophantine inputs, round decomposition, return probabilities and scaling."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from . import seeding
from .chain import LazyChain, WalkerTable, build, evolve_checkpoints, point_mass
from .graph import GOLDEN, GadgetSpec, gen_biased_cycle, gen_two_cycle_gadget
from .mixing import thresholds
from .stats import fit_exponent

log = logging.getLogger(__name__)

__all__ = [
    "ContinuedFraction",
    "GapReport",
    "GadgetMoments",
    "RoundSamples",
    "LineConcentration",
    "SensitivityRow",
    "SensitivityReport",
    "cf_expand",
    "sequence_gap",
    "f_closed_form",
    "gadget_moments",
    "gadget_chain",
    "single_cycle_chain",
    "commute_mean_exact",
    "sample_commutes",
    "sample_rounds",
    "round_completion_times",
    "round_sum_profile",
    "return_probability_profile",
    "return_probability_mc",
    "killed_return_profile",
    "line_walk_concentration",
    "sensitivity_experiment",
    "MAX_CF_DEPTH",
]

MAX_CF_DEPTH = 40


@dataclass(frozen=True)
class ContinuedFraction:
    coefficients: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def value(self) -> Fraction:
        return Fraction(self.p[-1], self.q[-1])


def cf_expand(x, depth: int = 20) -> ContinuedFraction:
    """Continued fraction ``[a0; a1, a2, ...]`` of ``x`` with at most ``depth`` partial quotients.

    Terminates early when the remainder vanishes. The convergents obey
    q_{i+1} = a_{i+1} q_i + q_{i-1}.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    if depth > MAX_CF_DEPTH:
        raise ValueError(f"depth {depth} exceeds the reliable horizon {MAX_CF_DEPTH}")
    with localcontext() as ctx:
        ctx.prec = 60
        # ints, floats and Fractions are exact rationals; Decimals stand in for irrationals
        r = x if isinstance(x, Decimal) else Fraction(x)
        target = Fraction(r)
        # floats carry ~16 digits, so stop once the convergent matches them
        tol = Fraction(1, 10**15) * max(1, abs(target)) if isinstance(x, float) else Fraction(0)
        coeffs, ps, qs = [], [], []
        p_prev, p, q_prev, q = 0, 1, 1, 0
        for _ in range(depth):
            a = math.floor(r)
            coeffs.append(a)
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
            ps.append(p)
            qs.append(q)
            frac = r - a
            if frac == 0 or abs(Fraction(p, q) - target) <= tol:
                break
            if isinstance(frac, Decimal) and frac < Decimal(10) ** -40:
                break
            r = 1 / frac
    cf = ContinuedFraction(tuple(coeffs), tuple(ps), tuple(qs))
    # a convergent cut off by depth is still within 1/q^2 of x
    if abs(float(cf.value) - float(x)) > max(1e-9, 1.0 / float(qs[-1]) ** 2):
        raise ArithmeticError("reconstruction drifted from the input")
    return cf


@dataclass(frozen=True)
class GapReport:
    n: int
    gap: float
    gap_linear: float
    max_interval_count: int


def sequence_gap(xi: float, n: int) -> GapReport:
    """Largest spacing of ``{k xi mod 1 : 1 <= k <= n}`` and the densest closed window of length 1/n."""
    if n < 1:
        raise ValueError("n must be positive")
    k = np.arange(1, n + 1, dtype=np.float64)
    x = np.sort(np.mod(k * xi, 1.0))
    diffs = np.diff(x)
    gap_linear = float(diffs.max()) if diffs.size else 0.0
    gap = max(gap_linear, float(1.0 - x[-1] + x[0]))
    ext = np.concatenate([x, x + 1.0])
    counts = np.searchsorted(ext, x + 1.0 / n, side="right") - np.arange(n)
    return GapReport(n, gap, gap_linear, int(counts.max()))


def f_closed_form(n: int) -> float:
    """Mean time for the (2/3, 1/3) walk on Z_n to reach n/2 from 0."""
    h = n / 2
    return 3 * n / 2 - 3 * n * 2 ** (-h) * (2**h - 1) / (2**h - 2 ** (-h))


@dataclass(frozen=True)
class GadgetMoments:
    n: int
    alpha: float
    f_n: float
    mean_T1: float
    mean_T2: float
    beta: float
    ratio: float


def gadget_moments(n: int, alpha: float) -> GadgetMoments:
    if n % 4:
        raise ValueError("n must be divisible by 4")
    f = f_closed_form(n)
    beta = 2 + 1 / (1 - alpha)
    return GadgetMoments(n, alpha, f, beta * f, 4 * f, beta, 2 * (beta - 4) / (beta + 4))


def gadget_chain(spec: GadgetSpec) -> LazyChain:
    gd = gen_two_cycle_gadget(spec)
    return build(gd.graph, gd.holding, name=f"gadget(n={spec.n}, alpha={spec.alpha:.6g})")


def single_cycle_chain(spec: GadgetSpec, cycle: int = 1) -> LazyChain:
    """One biased n-cycle carrying the gadget's holding on cycle 1 (left) or 2 (right)."""
    n = spec.n
    hold = np.full(n, 0.5)
    if cycle == 1:
        for i in range(1, n):
            if spec.alpha_position(i):
                hold[i] = spec.alpha
    elif cycle != 2:
        raise ValueError("cycle must be 1 or 2")
    return build(gen_biased_cycle(n, 2, 1), hold)


def _hit_mean(P: np.ndarray, target: int, start: int) -> float:
    keep = np.arange(P.shape[0]) != target
    h = np.linalg.solve(np.eye(P.shape[0] - 1) - P[np.ix_(keep, keep)], np.ones(P.shape[0] - 1))
    full = np.zeros(P.shape[0])
    full[keep] = h
    return float(full[start])


def commute_mean_exact(spec: GadgetSpec, cycle: int = 1) -> float:
    """E[T] for the commute 0 -> n/2 -> 0 on a single cycle, by linear solves."""
    P = np.asarray(single_cycle_chain(spec, cycle).dense)
    a = spec.n // 2
    return _hit_mean(P, a, 0) + _hit_mean(P, 0, a)


def _commute_block(table, a, rng, size):
    states = np.zeros(size, dtype=np.int64)
    stage = np.zeros(size, dtype=np.int8)
    dur = np.zeros(size, dtype=np.int64)
    active = np.ones(size, dtype=bool)
    t = 0
    while active.any():
        t += 1
        idx = np.flatnonzero(active)
        states[idx] = table.step(states[idx], rng)
        reached = (stage[idx] == 0) & (states[idx] == a)
        stage[idx[reached]] = 1
        back = (stage[idx] == 1) & (states[idx] == 0)
        done = idx[back]
        dur[done] = t
        active[done] = False
    return dur


def sample_commutes(
    spec: GadgetSpec, cycle: int, replicas: int, seed: int, workers: int | None = None
) -> np.ndarray:
    """Independent commute times 0 -> n/2 -> 0 on a single cycle."""
    table = WalkerTable(single_cycle_chain(spec, cycle))
    parts = seeding.map_blocks(_commute_block, replicas, seed, args=(table, spec.n // 2), workers=workers)
    return np.concatenate(parts)


@dataclass(frozen=True)
class RoundSamples:
    xi: np.ndarray
    durations: np.ndarray
    partial_sums: np.ndarray

    @property
    def cycles(self) -> np.ndarray:
        """1 for rounds on the left cycle, 2 for the right."""
        return np.where(self.xi == 1, 1, 2)


def sample_rounds(spec: GadgetSpec, k: int, seed: int, replicas: int = 1) -> RoundSamples:
    """``replicas`` independent sequences of k rounds with fair cycle choices.

    Returns arrays of shape (replicas, k); ``partial_sums[:, j]`` is S_{j+1}.
    """
    if k < 1:
        raise ValueError("k must be positive")
    total = replicas * k
    rng = seeding.stream(seed, 10**6)
    xi = rng.integers(0, 2, size=total)
    t1 = sample_commutes(spec, 1, total, seed)
    t2 = sample_commutes(spec, 2, total, seed + 1)
    dur = np.where(xi == 1, t1, t2).reshape(replicas, k)
    xi = xi.reshape(replicas, k)
    return RoundSamples(xi, dur, np.cumsum(dur, axis=1))


def _gadget_round_block(table, a, b, rho, rng, size):
    states = np.zeros(size, dtype=np.int64)
    armed = np.zeros(size, dtype=bool)
    rounds = np.zeros(size, dtype=np.int64)
    when = np.zeros(size, dtype=np.int64)
    active = np.ones(size, dtype=bool)
    t = 0
    while active.any():
        t += 1
        idx = np.flatnonzero(active)
        states[idx] = table.step(states[idx], rng)
        s = states[idx]
        armed[idx] |= (s == a) | (s == b)
        closing = idx[armed[idx] & (s == 0)]
        armed[closing] = False
        rounds[closing] += 1
        done = closing[rounds[closing] == rho]
        when[done] = t
        active[done] = False
    return when


def round_completion_times(
    spec: GadgetSpec, rho: int, replicas: int, seed: int, workers: int | None = None
) -> np.ndarray:
    """Time at which the walk on the full gadget completes its rho-th round from 0."""
    gd = gen_two_cycle_gadget(spec)
    table = WalkerTable(build(gd.graph, gd.holding))
    args = (table, gd.landmarks["a"], gd.landmarks["b"], rho)
    return np.concatenate(seeding.map_blocks(_gadget_round_block, replicas, seed, args=args, workers=workers))


def round_sum_profile(spec: GadgetSpec, times: Sequence[int], replicas: int, seed: int) -> np.ndarray:
    """Monte Carlo ``sum_k P(S_k = t)`` at each requested t."""
    times = np.asarray(times, dtype=np.int64)
    tmax = int(times.max())
    mean_round = 0.5 * (commute_mean_exact(spec, 1) + commute_mean_exact(spec, 2))
    k = int(math.ceil(tmax / mean_round * 1.5)) + 8
    rs = sample_rounds(spec, k, seed, replicas)
    if (rs.partial_sums[:, -1] <= tmax).any():
        log.warning("some round sequences ended before t=%d; profile slightly low", tmax)
    hits = np.bincount(rs.partial_sums[rs.partial_sums <= tmax], minlength=tmax + 1)
    return hits[times] / replicas


def return_probability_profile(
    spec: GadgetSpec, times: Sequence[int], mode: str = "exact", replicas: int = 10_000, seed: int = 0
) -> list[tuple[int, float]]:
    """``P_0(X_t = 0)`` on the gadget at each requested time."""
    times = sorted(int(t) for t in times)
    if mode == "mc":
        return list(zip(times, return_probability_mc(spec, times, replicas, seed).tolist()))
    if mode != "exact":
        raise ValueError("mode must be 'exact' or 'mc'")
    if 2 * spec.n - 1 > 2 * 10**4:
        raise ValueError("exact mode limited to 2*10^4 states")
    c = gadget_chain(spec)
    return [(t, float(mu[0])) for t, mu in evolve_checkpoints(c, point_mass(c.n, 0), times)]


def _return_block(table, times, rng, size):
    states = np.zeros(size, dtype=np.int64)
    out = np.zeros(len(times))
    t = 0
    for i, target in enumerate(times):
        while t < target:
            states = table.step(states, rng)
            t += 1
        out[i] = np.count_nonzero(states == 0)
    return out


def return_probability_mc(spec: GadgetSpec, times: Sequence[int], replicas: int, seed: int) -> np.ndarray:
    table = WalkerTable(gadget_chain(spec))
    parts = seeding.map_blocks(_return_block, replicas, seed, args=(table, list(times)))
    return np.sum(parts, axis=0) / replicas


def killed_return_profile(spec: GadgetSpec, s_max: int) -> np.ndarray:
    """``P_0(X_s = 0, tau_a and tau_b > s)`` for s = 0..s_max, exactly."""
    gd = gen_two_cycle_gadget(spec)
    c = build(gd.graph, gd.holding)
    K = c.kernel.tolil()
    for v in (gd.landmarks["a"], gd.landmarks["b"]):
        K[:, v] = 0.0
    KT = K.tocsr().T.tocsr()
    mu = point_mass(c.n, 0)
    out = [1.0]
    for _ in range(s_max):
        mu = KT @ mu
        out.append(float(mu[0]))
    return np.array(out)


@dataclass(frozen=True)
class LineConcentration:
    t: int
    k: int
    mean_tau_k: float
    var_tau_k: float
    C: float
    coverage: float


def _passage_moments(hold, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Mean and variance of the passage x-1 -> x for x = lo+1..hi (walk reflected far below lo)."""
    m_prev = s_prev = None
    means, vars_ = [], []
    for x in range(lo - 64, hi + 1):
        h = hold(x - 1)
        p, q = 2 * (1 - h) / 3, (1 - h) / 3
        if m_prev is None:
            # reflecting floor: the first passage is geometric
            m = 1 / (1 - h)
            s = (1 + h) / (1 - h) ** 2
        else:
            m = (1 + q * m_prev) / p
            s = (1 + 2 * (h * m + q * (m_prev + m)) + q * (s_prev + 2 * m_prev * m)) / p
        if x > lo:
            means.append(m)
            vars_.append(s - m * m)
        m_prev, s_prev = m, s
    return np.array(means), np.array(vars_)


def line_walk_concentration(
    delta: float,
    t: int,
    replicas: int = 10_000,
    seed: int = 0,
    holding=0.5,
    C: float | None = None,
    target: float = 0.9,
) -> LineConcentration:
    """Concentration of the (2/3, 1/3) birth-death walk on Z around k(t).

    k is the largest level with E_0[tau_k] < t. Without an explicit ``C`` the
    half-width follows Chebyshev: Var(tau_k) / (C sqrt(t) - c2)^2 <= (1 - target)/2,
    where c2 bounds a single passage mean.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    hold = holding if callable(holding) else (lambda x, h=float(holding): h)
    span = np.arange(-t - 1, t + 2)
    hvals = np.array([hold(int(x)) for x in span])
    if np.any(hvals > 1 - delta + 1e-15) or np.any(hvals < 0):
        raise ValueError("holding must lie in [0, 1 - delta]")
    means, vars_ = _passage_moments(hold, 0, t + 1)
    cum = np.concatenate([[0.0], np.cumsum(means)])
    k = int(np.flatnonzero(cum < t).max())
    var_k = float(np.sum(vars_[:k]))
    c2 = float(means[: k + 1].max())
    if C is None:
        C = (math.sqrt(2 * var_k / (1 - target)) + c2) / math.sqrt(t)
    rng = seeding.stream(seed, 0)
    pos = np.zeros(replicas, dtype=np.int64)
    off = t + 1
    for _ in range(t):
        h = hvals[pos + off]
        u = rng.random(replicas)
        up = u < 2 * (1 - h) / 3
        down = ~up & (u < 1 - h)
        pos += up.astype(np.int64) - down.astype(np.int64)
    half = C * math.sqrt(t)
    coverage = float(np.mean(np.abs(pos - k) <= half))
    return LineConcentration(t, k, float(cum[k]), var_k, float(C), coverage)


@dataclass(frozen=True)
class SensitivityRow:
    n: int
    alpha: float
    t_mix: int | None
    t_unif: int | None


@dataclass(frozen=True)
class SensitivityReport:
    rows: tuple[SensitivityRow, ...]
    exponents_mix: dict[float, float]
    exponents_unif: dict[float, float]
    constants_mix: dict[float, tuple[float, ...]]


def _threshold_job(n, alpha, eps, interval):
    c = gadget_chain(GadgetSpec(n, alpha, interval))
    r = thresholds(c, eps)
    return SensitivityRow(n, alpha, r.t_mix, r.t_unif)


def sensitivity_experiment(
    n_grid: Sequence[int],
    alphas: Sequence[float] = (0.5, GOLDEN),
    eps: float = 0.25,
    interval: str = "closed",
    workers: int = 1,
) -> SensitivityReport:
    """Exact t_mix and t_unif on the gadget over ``n_grid`` and log-log exponents per alpha."""
    for n in n_grid:
        if n % 4:
            raise ValueError(f"n={n} is not divisible by 4")
    jobs = [(n, a) for a in alphas for n in n_grid]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_threshold_job, *zip(*jobs), [eps] * len(jobs), [interval] * len(jobs)))
    else:
        rows = [_threshold_job(n, a, eps, interval) for n, a in jobs]
    exp_mix, exp_unif, consts = {}, {}, {}
    for a in alphas:
        sel = [r for r in rows if r.alpha == a]
        ok_mix = [r for r in sel if r.t_mix]
        ok_unif = [r for r in sel if r.t_unif]
        exp_mix[a] = fit_exponent([r.n for r in ok_mix], [r.t_mix for r in ok_mix])[0] if len(ok_mix) > 1 else math.nan
        exp_unif[a] = (
            fit_exponent([r.n for r in ok_unif], [r.t_unif for r in ok_unif])[0] if len(ok_unif) > 1 else math.nan
        )
        consts[a] = tuple(r.t_mix / r.n**1.5 for r in ok_mix)
    return SensitivityReport(tuple(rows), exp_mix, exp_unif, consts)
