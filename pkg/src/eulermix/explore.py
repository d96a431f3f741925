"""Exploration times T_k and the phase decomposition used to bound them.

The walk's vertices are arranged along a cycle of the cube of a spanning tree
(consecutive vertices at undirected distance at most 3). A phase ends when the
walk steps onto a good vertex or onto the cycle successor of the phase's start.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import seeding
from .chain import LazyChain, WalkerTable
from .graph import EulerianMultigraph, undirected_distances, validate
from .report import Verdict
from .stats import Estimate, fit_exponent, pooled

log = logging.getLogger(__name__)

__all__ = [
    "CycleLabelling",
    "PhaseRecord",
    "ExplorationRecord",
    "PhaseAuditError",
    "bfs_tree",
    "ham_labelling",
    "verify_labelling",
    "good_vertices",
    "good_vertices_naive",
    "good_positions",
    "run_phases",
    "exploration_audit",
]


class PhaseAuditError(AssertionError):
    """A phase invariant failed; carries the offending replica state."""

    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump


@dataclass(frozen=True)
class CycleLabelling:
    order: tuple[int, ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def position(self) -> np.ndarray:
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[list(self.order)] = np.arange(len(self.order))
        return pos


@dataclass(frozen=True)
class PhaseRecord:
    start: int
    successor: int
    visited: int
    good: int
    bad: int
    length: int


@dataclass
class ExplorationRecord:
    ks: tuple[int, ...]
    times: list[Estimate]
    max_phases: dict[int, int]
    phase_counts: dict[int, np.ndarray] = field(default_factory=dict)
    trace: list[PhaseRecord] = field(default_factory=list)
    badgood_checked: int = 0


def _adjacency(g) -> list[list[int]]:
    if isinstance(g, EulerianMultigraph):
        return g.undirected_neighbors()
    return [sorted(set(int(w) for w in nb) - {v}) for v, nb in enumerate(g)]


def bfs_tree(adj: Sequence[Sequence[int]], root: int) -> list[list[int]]:
    """Children lists of the BFS spanning tree from ``root`` (neighbours scanned in index order)."""
    n = len(adj)
    children: list[list[int]] = [[] for _ in range(n)]
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    queue = [root]
    for u in queue:
        for w in sorted(adj[u]):
            if not seen[w]:
                seen[w] = True
                children[u].append(w)
                queue.append(w)
    if not seen.all():
        raise ValueError("graph is not connected")
    return children


def ham_labelling(g, root: int = 0) -> CycleLabelling:
    """Cyclic order with consecutive vertices at undirected distance <= 3.

    On a tree rooted at v with smallest child w, cutting the edge (v, w) leaves
    the part containing v, labelled from v, followed by w's subtree labelled from w
    and reversed. Unrolled, the order is v then the reversed labels of v's children
    from the largest index down.
    """
    adj = _adjacency(g)
    children = bfs_tree(adj, root)
    lab: dict[int, list[int]] = {}
    stack = [(root, False)]
    while stack:
        v, ready = stack.pop()
        if ready:
            out = [v]
            for ch in reversed(children[v]):
                out.extend(reversed(lab.pop(ch)))
            lab[v] = out
        else:
            stack.append((v, True))
            stack.extend((ch, False) for ch in children[v])
    edges = tuple((u, w) for u, chs in enumerate(children) for w in chs)
    return CycleLabelling(tuple(lab[root]), edges)


def verify_labelling(g, lab: CycleLabelling | Sequence[int]) -> bool:
    """Permutation check plus d(v_i, v_{i+1}) <= 3 and d(v_1, v_n) = 1 on the undirected view."""
    adj = _adjacency(g)
    order = list(lab.order if isinstance(lab, CycleLabelling) else lab)
    n = len(adj)
    if sorted(order) != list(range(n)):
        return False
    if n == 1:
        return True
    dist = {}

    def d(u, v):
        if u not in dist:
            dist[u] = _bfs(adj, u)
        return dist[u][v]

    if any(d(order[i], order[i + 1]) > 3 for i in range(n - 1)):
        return False
    return d(order[0], order[-1]) == 1


def _bfs(adj, s):
    n = len(adj)
    dist = np.full(n, -1, dtype=np.int64)
    dist[s] = 0
    queue = [s]
    for u in queue:
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def good_positions(visited: np.ndarray) -> np.ndarray:
    """Good cycle positions for each row of ``visited`` (shape ``(..., n)``, in cycle order).

    Position p is good iff unvisited and every window p..p+l-1 (l <= n, cyclic)
    holds at most l/2 visited positions, i.e. all prefix sums of 2y-1 from p are <= 0.
    """
    y = np.asarray(visited, dtype=bool)
    n = y.shape[-1]
    s = np.where(y, 1, -1).astype(np.int64)
    s2 = np.concatenate([s, s], axis=-1)
    csum = np.cumsum(s2, axis=-1)
    before = np.concatenate([np.zeros(y.shape[:-1] + (1,), dtype=np.int64), csum[..., :n]], axis=-1)
    windows = sliding_window_view(csum, n, axis=-1)[..., :n, :]
    worst = windows.max(axis=-1) - before[..., :n]
    return ~y & (worst <= 0)


def good_vertices(lab: CycleLabelling, Y) -> set[int]:
    order = np.asarray(lab.order)
    y = np.zeros(order.size, dtype=bool)
    y[lab.position[list(Y)]] = True
    return set(order[good_positions(y)].tolist())


def good_vertices_naive(lab: CycleLabelling, Y) -> set[int]:
    order = list(lab.order)
    n = len(order)
    Y = set(Y)
    good = set()
    for j in range(n):
        if order[j] in Y:
            continue
        if all(sum(order[(j + i) % n] in Y for i in range(ell)) <= ell / 2 for ell in range(1, n + 1)):
            good.add(order[j])
    return good


def _phase_block(table, order, ks, start, n, record_trace, rng, size):
    """Simulate ``size`` walkers to T_max(ks); returns times, phase counts, badgood checks, trace."""
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    kmax = max(ks)
    kidx = {k: i for i, k in enumerate(ks)}
    states = np.full(size, start, dtype=np.int64)
    vis = np.zeros((size, n), dtype=bool)  # in cycle-position order
    vis[:, pos[start]] = True
    nvis = np.ones(size, dtype=np.int64)
    good = good_positions(vis)
    succ = np.full(size, (pos[start] + 1) % n, dtype=np.int64)
    phases = np.ones(size, dtype=np.int64)
    phase_start = np.zeros(size, dtype=np.int64)
    T = np.zeros((size, len(ks)), dtype=np.int64)
    Phi = np.zeros((size, len(ks)), dtype=np.int64)
    trace: list[PhaseRecord] = []
    checks = 0

    def check_badgood(rows):
        nonlocal checks
        y = nvis[rows]
        bad = n - good[rows].sum(axis=1) - y
        small = y <= n / 2
        checks += int(small.sum())
        fail = small & (bad > y)
        if fail.any():
            r = int(rows[np.flatnonzero(fail)[0]])
            raise PhaseAuditError(
                "bad vertices outnumber visited ones",
                {"order": order.tolist(), "visited": order[vis[r]].tolist(), "bad": int(bad[fail][0])},
            )

    def note_trace(rows, t):
        if record_trace and rows.size and rows[0] == 0:
            y = int(nvis[0])
            u = int(good[0].sum())
            trace.append(PhaseRecord(int(states[0]), int(order[succ[0]]), y, u, n - u - y, 0))

    all_rows = np.arange(size)
    check_badgood(all_rows)
    note_trace(all_rows, 0)
    for k in ks:
        if k == 1:
            T[:, kidx[1]] = 0
            Phi[:, kidx[1]] = 0
    active = nvis < kmax
    t = 0
    while active.any():
        t += 1
        idx = np.flatnonzero(active)
        states[idx] = table.step(states[idx], rng)
        p = pos[states[idx]]
        is_new = ~vis[idx, p]
        ends = good[idx, p] | (p == succ[idx])
        # phases started strictly before now, for every newly reached count
        vis[idx, p] = True
        nvis[idx] += is_new
        new_rows = idx[is_new]
        for r in new_rows:
            k = int(nvis[r])
            if k in kidx:
                T[r, kidx[k]] = t
                Phi[r, kidx[k]] = phases[r]
        end_rows = idx[ends]
        if end_rows.size:
            if record_trace and end_rows[0] == 0 and trace:
                last = trace[-1]
                trace[-1] = PhaseRecord(last.start, last.successor, last.visited, last.good, last.bad,
                                        t - int(phase_start[0]))
            phases[end_rows] += 1
            phase_start[end_rows] = t
            succ[end_rows] = (pos[states[end_rows]] + 1) % n
            good[end_rows] = good_positions(vis[end_rows])
            check_badgood(end_rows)
            note_trace(end_rows, t)
        active[idx] = nvis[idx] < kmax
    return T, Phi, checks, trace


def run_phases(
    c: LazyChain,
    start: int,
    k_targets: Sequence[int],
    replicas: int = 10_000,
    seed: int = 0,
    lab: CycleLabelling | None = None,
    workers: int | None = None,
) -> tuple[ExplorationRecord, list[PhaseRecord]]:
    """Monte Carlo T_k with online phase audits.

    Raises :class:`PhaseAuditError` if some replica needs more than 2k phases before
    seeing k vertices, or if bad vertices outnumber visited ones while at most half
    the graph is visited.
    """
    if c.graph is None:
        raise ValueError("phase bookkeeping needs the underlying graph")
    n = c.n
    ks = tuple(sorted(set(int(k) for k in k_targets)))
    if not ks or ks[0] < 1 or ks[-1] > n:
        raise ValueError("k targets must lie in 1..n")
    lab = ham_labelling(c.graph, start) if lab is None else lab
    order = np.asarray(lab.order, dtype=np.int64)
    table = WalkerTable(c)
    blocks = seeding.map_blocks(
        _phase_block, replicas, seed, args=(table, order, ks, start, n, False), workers=workers
    )
    trace = _phase_block(table, order, ks, start, n, True, seeding.stream(seed, 0), 1)[3]
    T = np.concatenate([b[0] for b in blocks])
    Phi = np.concatenate([b[1] for b in blocks])
    times = []
    max_phases = {}
    counts = {}
    for i, k in enumerate(ks):
        tk = T[:, i].astype(float)
        times.append(pooled([(float(tk.sum()), float((tk * tk).sum()), tk.size)]))
        max_phases[k] = int(Phi[:, i].max())
        counts[k] = np.bincount(Phi[:, i])
        if max_phases[k] > 2 * k:
            r = int(np.argmax(Phi[:, i]))
            raise PhaseAuditError(
                f"{max_phases[k]} phases before visiting {k} vertices",
                {"replica": r, "k": k, "order": order.tolist(), "T_k": int(T[r, i])},
            )
    if np.any(np.diff(T, axis=1) < 0):
        raise PhaseAuditError("T_k decreased in k", {})
    rec = ExplorationRecord(ks, times, max_phases, counts, trace, sum(b[2] for b in blocks))
    return rec, trace


@dataclass(frozen=True)
class ExplorationAudit:
    regular: bool
    ks: tuple[int, ...]
    means: tuple[float, ...]
    stderrs: tuple[float, ...]
    bound: tuple[float, ...]
    exponent: float
    verdict: Verdict
    phase_verdict: Verdict


def exploration_audit(
    c: LazyChain,
    k_grid: Sequence[int],
    replicas: int = 10_000,
    seed: int = 0,
    starts: Sequence[int] = (0,),
    workers: int | None = None,
) -> ExplorationAudit:
    """E[T_k] against 512 k^2 (regular graphs) or 288 k^3 (general), plus the fitted exponent."""
    regular = validate(c.graph).regular_degree is not None
    ks = tuple(sorted(set(int(k) for k in k_grid)))
    name = "E[T_k] <= 512k^2" if regular else "E[T_k] <= 288k^3"
    verdict = Verdict(name)
    phase_v = Verdict("phases before T_k <= 2k")
    worst = np.zeros(len(ks))
    worst_se = np.zeros(len(ks))
    for j, s in enumerate(starts):
        rec, _ = run_phases(c, s, ks, replicas, seed + j, workers=workers)
        for i, k in enumerate(ks):
            bound = 512.0 * k * k if regular else 288.0 * k**3
            est = rec.times[i]
            verdict.record(est.mean, bound, f"start={s} k={k}", slack=3 * est.stderr)
            phase_v.record(rec.max_phases[k], 2 * k, f"start={s} k={k}")
            if est.mean > worst[i]:
                worst[i], worst_se[i] = est.mean, est.stderr
    fit = [(k, m) for k, m in zip(ks, worst) if k > 1 and m > 0]
    exponent = fit_exponent(*zip(*fit))[0] if len(fit) >= 2 else float("nan")
    bounds = tuple(512.0 * k * k if regular else 288.0 * k**3 for k in ks)
    return ExplorationAudit(
        regular, ks, tuple(worst.tolist()), tuple(worst_se.tolist()), bounds, exponent, verdict, phase_v
    )


def labelling_distances(g, lab: CycleLabelling) -> np.ndarray:
    """Undirected distances between cyclically consecutive labels."""
    order = lab.order
    if isinstance(g, EulerianMultigraph):
        return np.array(
            [undirected_distances(g, order[i])[order[(i + 1) % len(order)]] for i in range(len(order))]
        )
    adj = _adjacency(g)
    return np.array([_bfs(adj, order[i])[order[(i + 1) % len(order)]] for i in range(len(order))])
