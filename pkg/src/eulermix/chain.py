"""Transition kernels built from a graph plus per-vertex holding probabilities."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import EulerianMultigraph, reverse, validate

log = logging.getLogger(__name__)

__all__ = [
    "LazyChain",
    "WalkPath",
    "ChainError",
    "build",
    "from_matrix",
    "time_reversal",
    "additive_reversibilization",
    "stationary_dense_solve",
    "point_mass",
    "evolve",
    "evolve_checkpoints",
    "sample_path",
    "WalkerTable",
]

STOCHASTIC_TOL = 1e-12
RENORMALIZE_EVERY = 10_000
DENSE_CUTOFF = 512


class ChainError(ValueError):
    """Kernel construction failed an internal consistency check."""


@dataclass(frozen=True)
class LazyChain:
    """Row-stochastic kernel with its stationary distribution.

    ``kernel`` is CSR; :attr:`dense` materialises it on demand. ``holding`` is the
    per-vertex laziness used to build the chain and ``delta`` the smallest diagonal
    entry of the kernel.
    """

    kernel: sp.csr_matrix
    pi: np.ndarray
    holding: np.ndarray
    graph: EulerianMultigraph | None = None
    name: str = ""
    _dense: list = field(default_factory=list, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.kernel.shape[0]

    @property
    def dense(self) -> np.ndarray:
        if not self._dense:
            d = self.kernel.toarray()
            d.setflags(write=False)
            self._dense.append(d)
        return self._dense[0]

    @property
    def delta(self) -> float:
        return float(self.kernel.diagonal().min())

    @property
    def pi_star(self) -> float:
        return float(self.pi.min())

    def matrix(self, dense_cutoff: int = DENSE_CUTOFF):
        """Dense array below ``dense_cutoff`` states, CSR otherwise."""
        return self.dense if self.n < dense_cutoff else self.kernel

    def stationary_residual(self) -> float:
        return float(np.abs(self.kernel.T @ self.pi - self.pi).max())


@dataclass(frozen=True)
class WalkPath:
    states: np.ndarray
    seed: int


def _holding_vector(n: int, holding) -> np.ndarray:
    if isinstance(holding, Mapping):
        a = np.full(n, np.nan)
        for v, x in holding.items():
            a[int(v)] = float(x)
        if np.isnan(a).any():
            raise ValueError("holding map must cover every vertex")
    elif np.isscalar(holding):
        a = np.full(n, float(holding))
    else:
        a = np.asarray(holding, dtype=float).copy()
        if a.shape != (n,):
            raise ValueError(f"holding vector has shape {a.shape}, expected ({n},)")
    if np.any(a < 0.0) or np.any(a >= 1.0):
        raise ValueError("holding probabilities must lie in [0, 1)")
    a.setflags(write=False)
    return a


def _check_kernel(P: sp.csr_matrix) -> None:
    rows = np.asarray(P.sum(axis=1)).ravel()
    bad = np.abs(rows - 1.0).max()
    if bad > STOCHASTIC_TOL:
        raise ChainError(f"kernel rows deviate from 1 by {bad:.3e}")
    if P.nnz and P.data.min() < 0:
        raise ChainError("kernel has negative entries")


def _frozen(x: np.ndarray) -> np.ndarray:
    x.setflags(write=False)
    return x


def build(g: EulerianMultigraph, holding=0.5, name: str = "") -> LazyChain:
    """Walk on ``g`` that holds at v with probability a(v), else follows a uniform out-edge.

    P(v,v) = a(v) and P(v,w) = (1 - a(v)) mult(v,w) / outdeg(v); the stationary law is
    proportional to outdeg(x) / (1 - a(x)) and is verified against the kernel.
    """
    info = validate(g)
    if not info.eulerian:
        raise ValueError("graph is not Eulerian")
    if not info.connected:
        raise ValueError("graph is not connected")
    a = _holding_vector(g.n, holding)
    rows, cols, vals = list(range(g.n)), list(range(g.n)), list(a)
    for u, v, k in g.edges():
        rows.append(u)
        cols.append(v)
        vals.append((1.0 - a[u]) * k / g.out_degree[u])
    P = sp.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))
    P.sum_duplicates()
    P.eliminate_zeros()
    _check_kernel(P)
    w = g.out_degree / (1.0 - a)
    pi = _frozen(w / w.sum())
    resid = float(np.abs(P.T @ pi - pi).max())
    if resid > STOCHASTIC_TOL:
        raise ChainError(f"closed-form stationary vector has residual {resid:.3e}")
    return LazyChain(P, pi, a, g, name)


def from_matrix(P, pi: np.ndarray | None = None, name: str = "") -> LazyChain:
    """Wrap an arbitrary irreducible stochastic matrix (stationary law solved if absent)."""
    K = sp.csr_matrix(P, dtype=float)
    _check_kernel(K)
    if pi is None:
        pi = stationary_dense_solve(K.toarray())
    a = _frozen(K.diagonal().copy())
    return LazyChain(K, _frozen(np.asarray(pi, dtype=float).copy()), a, None, name)


def stationary_dense_solve(P: np.ndarray) -> np.ndarray:
    """Solve pi (P - I) = 0, sum(pi) = 1 by least squares (audit fallback)."""
    n = P.shape[0]
    A = np.vstack([P.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    return pi


def time_reversal(c: LazyChain) -> LazyChain:
    """Kernel with pi(v) Phat(v,u) = pi(u) P(u,v); on an Eulerian graph this is the reversed graph."""
    D = sp.diags(c.pi)
    Dinv = sp.diags(1.0 / c.pi)
    Phat = sp.csr_matrix(Dinv @ c.kernel.T @ D)
    _check_kernel(Phat)
    g = reverse(c.graph) if c.graph is not None else None
    return LazyChain(Phat, c.pi, c.holding, g, f"{c.name}^rev" if c.name else "")


def additive_reversibilization(c: LazyChain) -> LazyChain:
    """Q = (P + Phat) / 2, reversible with respect to the same pi."""
    Q = sp.csr_matrix(0.5 * (c.kernel + time_reversal(c).kernel))
    _check_kernel(Q)
    return LazyChain(Q, c.pi, c.holding, c.graph, f"{c.name}^sym" if c.name else "")


def point_mass(n: int, v: int) -> np.ndarray:
    mu = np.zeros(n)
    mu[v] = 1.0
    return mu


def evolve_checkpoints(c: LazyChain, mu0: np.ndarray, times: Iterable[int]):
    """Yield ``(t, mu0 P^t)`` for each requested time (sorted, nonnegative)."""
    PT = c.kernel.T.tocsr()
    mu = np.asarray(mu0, dtype=float).copy()
    if mu.shape != (c.n,):
        raise ValueError("distribution length does not match the chain")
    now = 0
    for t in sorted(int(x) for x in times):
        if t < 0:
            raise ValueError("times must be nonnegative")
        while now < t:
            mu = PT @ mu
            now += 1
            if now % RENORMALIZE_EVERY == 0:
                s = mu.sum()
                if s != 1.0:
                    log.debug("renormalising at t=%d, mass drift %.3e", now, s - 1.0)
                mu /= s
        yield t, mu.copy()


def evolve(c: LazyChain, mu0: np.ndarray, t: int) -> np.ndarray:
    """``mu0 P^t`` by ``t`` sparse steps."""
    for _, mu in evolve_checkpoints(c, mu0, [t]):
        return mu
    raise AssertionError("unreachable")


class WalkerTable:
    """Per-state cumulative transition tables for stepping many walkers at once.

    Row x's cumulative probabilities are shifted by x into one sorted array, so a
    walker at x with uniform u moves to the entry found by searching for x + u.
    """

    def __init__(self, c: LazyChain):
        K = c.kernel
        self.indices = K.indices.astype(np.int64)
        self.flat = np.empty(K.nnz)
        self.cum = []
        for x in range(c.n):
            lo, hi = K.indptr[x], K.indptr[x + 1]
            cum = np.cumsum(K.data[lo:hi])
            cum[-1] = 1.0
            self.flat[lo:hi] = x + cum
            self.cum.append(cum)
        self.targets = [self.indices[K.indptr[x]:K.indptr[x + 1]] for x in range(c.n)]
        self.last = K.indptr[1:].astype(np.int64) - 1

    def step(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(states.shape[0])
        j = np.searchsorted(self.flat, states + u, side="right")
        # x + u can round up to x + 1 when x is large
        return self.indices[np.minimum(j, self.last[states])]


def sample_path(c: LazyChain, start: int, t: int, seed: int) -> WalkPath:
    """Single trajectory ``X_0..X_t`` of the chain, deterministic in ``seed``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    table = WalkerTable(c)
    rng = np.random.default_rng(seed)
    u = rng.random(t)
    cum = [row.tolist() for row in table.cum]
    targets = [row.tolist() for row in table.targets]
    states = np.empty(t + 1, dtype=np.int64)
    x = int(start)
    states[0] = x
    for s in range(t):
        row = cum[x]
        j = 0
        while u[s] >= row[j]:
            j += 1
        x = targets[x][j]
        states[s + 1] = x
    return WalkPath(states, seed)
