"""Hitting, commute and exit times, plus Monte Carlo walkers for cover and collision times."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from . import seeding
from .chain import LazyChain, WalkerTable
from .graph import undirected_distances, validate
from .report import Verdict
from .stats import Estimate, pooled

log = logging.getLogger(__name__)

__all__ = [
    "HittingMatrix",
    "Trajectory",
    "CollisionEstimate",
    "hitting_times",
    "commute_time",
    "exit_time",
    "exit_times",
    "moving_target_collision",
    "adversarial_collision",
    "antipode",
    "visit_count",
    "visit_counts",
    "cover_time",
    "bound_audit",
    "distance_matrix",
    "log_factor_sweep",
]

RESIDUAL_TOL = 1e-9
TRUNCATION_FLAG = 0.10


@dataclass(frozen=True)
class HittingMatrix:
    H: np.ndarray
    residual: float

    def __getitem__(self, uv):
        return self.H[uv]

    @property
    def max(self) -> float:
        return float(self.H.max())


def hitting_times(c: LazyChain) -> HittingMatrix:
    """Expected hitting times ``H[u, v] = E_u tau_v`` by one linear solve per target."""
    P = np.asarray(c.dense)
    n = c.n
    H = np.zeros((n, n))
    worst = 0.0
    for v in range(n):
        keep = np.arange(n) != v
        A = np.eye(n - 1) - P[np.ix_(keep, keep)]
        h = np.linalg.solve(A, np.ones(n - 1))
        worst = max(worst, float(np.abs(A @ h - 1.0).max()))
        H[keep, v] = h
    if worst > RESIDUAL_TOL * max(1.0, float(H.max())):
        raise np.linalg.LinAlgError(f"hitting-time solve residual {worst:.3e}")
    return HittingMatrix(H, worst)


def commute_time(c: LazyChain, u: int, v: int, H: HittingMatrix | None = None) -> float:
    if u == v:
        raise ValueError("commute time needs two distinct vertices")
    H = hitting_times(c) if H is None else H
    return float(H.H[u, v] + H.H[v, u])


def exit_times(c: LazyChain, S: Iterable[int]) -> dict[int, float]:
    """``E_v[first time outside S]`` for every ``v`` in ``S``."""
    S = np.array(sorted(set(int(v) for v in S)), dtype=np.int64)
    if S.size == 0:
        raise ValueError("S must be nonempty")
    if S.size >= c.n:
        raise ValueError("S must not be the whole state space")
    P = np.asarray(c.dense)
    h = np.linalg.solve(np.eye(S.size) - P[np.ix_(S, S)], np.ones(S.size))
    return dict(zip(S.tolist(), h.tolist()))


def exit_time(c: LazyChain, S: Iterable[int], start: int) -> float:
    S = set(int(v) for v in S)
    if start not in S:
        raise ValueError("start must lie in S")
    return exit_times(c, S)[start]


@dataclass(frozen=True)
class Trajectory:
    """Deterministic target path ``u_t``.

    ``static`` sits at ``vertex``. ``sweep`` visits ``order`` cyclically starting at
    ``vertex``, advancing one place every ``dwell`` steps. ``antipodal`` is a sweep
    whose starting point is chosen at maximal undirected distance from the walker.
    """

    rule: str
    vertex: int = 0
    order: tuple[int, ...] | None = None
    dwell: int = 1

    def __post_init__(self):
        if self.rule not in ("static", "sweep", "antipodal"):
            raise ValueError(f"unknown trajectory rule {self.rule!r}")
        if self.dwell < 1:
            raise ValueError("dwell must be positive")

    def resolve(self, c: LazyChain, start: int) -> Trajectory:
        if self.rule != "antipodal":
            return self
        return Trajectory("sweep", antipode(c, start), self.order, self.dwell)

    def table(self, n: int, horizon: int) -> np.ndarray:
        """Targets ``u_0..u_horizon``."""
        t = np.arange(horizon + 1)
        if self.rule == "static":
            return np.full(horizon + 1, self.vertex, dtype=np.int64)
        order = np.arange(n) if self.order is None else np.asarray(self.order, dtype=np.int64)
        i0 = int(np.flatnonzero(order == self.vertex)[0])
        return order[(i0 + t // self.dwell) % order.size]


def antipode(c: LazyChain, v: int) -> int:
    """Smallest-index vertex at maximal undirected distance from ``v``."""
    if c.graph is None:
        raise ValueError("antipodal targets need a graph")
    dist = undirected_distances(c.graph, v)
    return int(np.flatnonzero(dist == dist.max())[0])


@dataclass(frozen=True)
class CollisionEstimate:
    mean: float
    stderr: float
    replicas: int
    seed: int
    truncated_fraction: float
    z_mean: float
    z_positive: float
    z_window: int

    @property
    def flagged(self) -> bool:
        return self.truncated_fraction > TRUNCATION_FLAG


def _collision_block(table, targets, inv_pi, start, horizon, z_window, rng, size):
    states = np.full(size, start, dtype=np.int64)
    tau = np.full(size, horizon, dtype=np.int64)
    alive = np.ones(size, dtype=bool)
    z = np.zeros(size)
    stop = max(horizon, 0)
    t = 0
    while t <= min(stop, z_window):
        u = targets[t]
        hit = states == u
        if t >= 1:
            z += hit * inv_pi[u]
        newly = hit & alive
        tau[newly] = t
        alive &= ~newly
        if t < stop:
            states = table.step(states, rng)
        t += 1
    # past the Z window only walkers still searching need to move
    idx = np.flatnonzero(alive)
    states = states[idx]
    while idx.size and t <= stop:
        hit = states == targets[t]
        tau[idx[hit]] = t
        idx, states = idx[~hit], states[~hit]
        if t < stop:
            states = table.step(states, rng)
        t += 1
    trunc = int(idx.size)
    tf = tau.astype(float)
    return float(tf.sum()), float((tf * tf).sum()), size, trunc, float(z.sum()), int((z > 0).sum())


def moving_target_collision(
    c: LazyChain,
    traj: Trajectory,
    replicas: int = 10_000,
    horizon: int | None = None,
    seed: int = 0,
    start: int = 0,
    z_window: int | None = None,
    workers: int | None = None,
) -> CollisionEstimate:
    """Monte Carlo ``E[tau_col]`` with ``tau_col = inf{t >= 0 : X_t = u_t}``.

    Walkers still free at ``horizon`` are counted at ``horizon``. The counter
    ``Z = sum_{1<=s<=z_window} 1(X_s = u_s) / pi(u_s)`` is accumulated alongside.
    """
    m = c.graph.m if c.graph is not None else c.n
    horizon = 100 * m * c.n if horizon is None else int(horizon)
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    z_window = min(horizon, c.n * c.n) if z_window is None else min(int(z_window), horizon)
    traj = traj.resolve(c, start)
    targets = traj.table(c.n, horizon)
    table = WalkerTable(c)
    parts = seeding.map_blocks(
        _collision_block,
        replicas,
        seed,
        args=(table, targets, 1.0 / c.pi, start, horizon, z_window),
        workers=workers,
    )
    est = pooled([(p[0], p[1], p[2]) for p in parts])
    trunc = sum(p[3] for p in parts) / replicas
    if trunc > TRUNCATION_FLAG:
        log.warning("collision estimate flagged: %.1f%% truncated at %d", 100 * trunc, horizon)
    return CollisionEstimate(
        est.mean,
        est.stderr,
        replicas,
        seed,
        trunc,
        sum(p[4] for p in parts) / replicas,
        sum(p[5] for p in parts) / replicas,
        z_window,
    )


def adversarial_collision(
    c: LazyChain,
    start: int = 0,
    dwells: Sequence[int] = (1, 2, 4),
    replicas: int = 10_000,
    seed: int = 0,
    workers: int | None = None,
) -> tuple[Trajectory, CollisionEstimate]:
    """Worst of a static target at the antipode and antipodal sweeps at each dwell."""
    trajs = [Trajectory("static", antipode(c, start))]
    trajs += [Trajectory("antipodal", dwell=d) for d in dwells]
    best = None
    for i, tr in enumerate(trajs):
        est = moving_target_collision(c, tr, replicas, seed=seed + i, start=start, workers=workers)
        if best is None or est.mean > best[1].mean:
            best = (tr, est)
    return best


def log_factor_sweep(
    n: int,
    ratios: Sequence[int],
    seed: int = 0,
    holding: float = 0.5,
    replicas: int = 10_000,
    workers: int | None = None,
) -> tuple[list[tuple[int, int, Trajectory, CollisionEstimate]], float, float]:
    """Adversarial collision on random Eulerian graphs with n vertices and about r n edges.

    Returns the rows and the least-squares fit ``E[tau]/(mn) ~ a + b log(m/n)``
    as ``(rows, a, b)``. Whether b vanishes asymptotically is open; nothing is asserted.
    """
    from .chain import build
    from .graph import gen_random_eulerian

    rows = []
    for r in ratios:
        g = gen_random_eulerian(n, r * n, seed=seed + r)
        traj, est = adversarial_collision(build(g, holding), replicas=replicas, seed=seed, workers=workers)
        rows.append((r, g.m, traj, est))
    if len(rows) < 2:
        return rows, float("nan"), float("nan")
    x = np.log([m / n for _, m, *_ in rows])
    y = np.array([est.mean / (m * n) for _, m, _, est in rows])
    b, a = np.polyfit(x, y, 1)
    return rows, float(a), float(b)


def _visit_block(table, v, checkpoints, rng, size):
    states = np.full(size, v, dtype=np.int64)
    count = np.zeros(size, dtype=np.int64)
    out = []
    s = 0
    for t in checkpoints:
        while s < t:
            count += states == v
            states = table.step(states, rng)
            s += 1
        cf = count.astype(float)
        out.append((float(cf.sum()), float((cf * cf).sum()), size))
    return out


def visit_counts(
    c: LazyChain,
    v: int,
    ts: Sequence[int],
    replicas: int = 10_000,
    seed: int = 0,
    workers: int | None = None,
) -> list[Estimate]:
    """``E_v N_v(t)`` with ``N_v(t) = #{s < t : X_s = v}`` at each ``t`` (one shared run)."""
    ts = [int(t) for t in ts]
    if any(t < 1 for t in ts) or ts != sorted(ts):
        raise ValueError("times must be positive and sorted")
    parts = seeding.map_blocks(
        _visit_block, replicas, seed, args=(WalkerTable(c), v, ts), workers=workers
    )
    return [pooled([p[i] for p in parts]) for i in range(len(ts))]


def visit_count(c: LazyChain, v: int, t: int, replicas: int = 10_000, seed: int = 0) -> Estimate:
    return visit_counts(c, v, [t], replicas, seed)[0]


def _cover_block(table, n, start, rng, size):
    states = np.full(size, start, dtype=np.int64)
    seen = np.zeros((size, n), dtype=bool)
    rows = np.arange(size)
    seen[rows, states] = True
    left = np.full(size, n - 1, dtype=np.int64)
    tau = np.zeros(size, dtype=np.int64)
    t = 0
    active = left > 0
    while active.any():
        t += 1
        idx = np.flatnonzero(active)
        states[idx] = table.step(states[idx], rng)
        new = ~seen[idx, states[idx]]
        seen[idx, states[idx]] = True
        left[idx] -= new
        done = idx[left[idx] == 0]
        tau[done] = t
        active[done] = False
    tf = tau.astype(float)
    return float(tf.sum()), float((tf * tf).sum()), size


def cover_time(
    c: LazyChain, start: int = 0, replicas: int = 10_000, seed: int = 0, workers: int | None = None
) -> Estimate:
    """Monte Carlo ``E_start[tau_cov]``."""
    if c.n == 1:
        return Estimate(0.0, 0.0, replicas)
    parts = seeding.map_blocks(
        _cover_block, replicas, seed, args=(WalkerTable(c), c.n, start), workers=workers
    )
    return pooled(parts)


def distance_matrix(c: LazyChain) -> np.ndarray:
    return np.array([undirected_distances(c.graph, u) for u in range(c.n)])


def _sample_sets(n: int, limit: int, rng: np.random.Generator, exhaustive_below: int = 8):
    """Nonempty proper subsets: all of them when ``n`` is small, else ``limit`` by size."""
    if n < exhaustive_below:
        for k in range(1, n):
            yield from (list(s) for s in itertools.combinations(range(n), k))
        return
    for _ in range(limit):
        k = int(rng.integers(1, n))
        yield sorted(rng.choice(n, size=k, replace=False).tolist())


def bound_audit(c: LazyChain, seed: int = 0, samples: int = 1000) -> list[Verdict]:
    """Check the universal commute, distance, exit and partition hitting bounds.

    Intended for the simple walk (no holding); a lazy walk slows every time by 1/(1-a).
    """
    g = c.graph
    if g is None:
        raise ValueError("bound audit needs the underlying graph")
    n, m = g.n, g.m
    rng = np.random.default_rng(seed)
    dist = distance_matrix(c)
    H = hitting_times(c).H
    com = Verdict("commute <= m*d")
    for u in range(n):
        for v in range(u + 1, n):
            com.record(H[u, v] + H[v, u], m * dist[u, v], f"u={u} v={v}")
    nbrs = [set(nb) - {v} for v, nb in enumerate(g.undirected_neighbors())]
    d_distinct = min(len(nb) for nb in nbrs)
    regular = validate(g).regular_degree
    soares = Verdict("d(v,A^c) <= 3|A|/d + 1")
    ret1 = Verdict("exit(A) <= 10|A|^2")
    key = Verdict("H(s,Z) <= 12|W|^2")
    for W in _sample_sets(n, samples, rng):
        Wset = set(W)
        inside = np.zeros(n, dtype=bool)
        inside[W] = True
        h = exit_times(c, W)
        to_out = dist[:, ~inside].min(axis=1)
        for v in W:
            soares.record(float(to_out[v]), 3 * len(W) / d_distinct + 1, f"A={W} v={v}")
            if regular is not None:
                ret1.record(h[v], 10 * len(W) ** 2, f"A={W} v={v}")
            if nbrs[v] - Wset:
                key.record(h[v], 12 * len(W) ** 2, f"W={W} s={v}")
    out = [com, soares, key]
    if regular is not None:
        out.append(ret1)
    return out
