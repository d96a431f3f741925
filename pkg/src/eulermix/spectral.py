"""Dirichlet forms, set spectra, the spectral profile and the uniform mixing bound it drives.

``lambda_of_set`` uses the L2 normalisation: ``lambda(S) = 1 - rho(Q_S)`` where ``Q_S``
is the additive reversibilization restricted to ``S``. Since Var(f) <= E[f^2] this
never exceeds the variance-normalised ratio, so bounds built from it stay valid.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .chain import LazyChain, additive_reversibilization

log = logging.getLogger(__name__)

__all__ = [
    "SetSpectrum",
    "SpectralProfile",
    "GMTBound",
    "SpectralError",
    "dirichlet_energy",
    "variance_ratio",
    "lambda_of_set",
    "spectral_profile",
    "gmt_bound",
    "short_time_bound",
    "EXACT_MAX_N",
]

EXACT_MAX_N = 20
POWER_TOL = 1e-12
POWER_BUDGET = 10**6


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True)
class SetSpectrum:
    subset: tuple[int, ...]
    lam: float
    perron_rho: float
    nu: np.ndarray
    exit_lambda: float
    max_exit: float

    @property
    def agreement(self) -> float:
        return abs(self.lam - self.exit_lambda)


@dataclass(frozen=True)
class SpectralProfile:
    """Right-continuous step function: Lambda(r) = values[i] on [masses[i], masses[i+1])."""

    masses: np.ndarray
    values: np.ndarray
    witnesses: tuple[tuple[int, ...], ...]
    pi_star: float
    subsets_examined: int

    def __call__(self, r: float) -> float:
        if r < self.masses[0] - 1e-15:
            raise ValueError(f"profile undefined below pi_* = {self.pi_star}")
        i = int(np.searchsorted(self.masses, r + 1e-15, side="right")) - 1
        return float(self.values[i])


@dataclass(frozen=True)
class GMTBound:
    a: float
    delta: float
    integral: float
    bound_steps: int
    integrand_trace: tuple[tuple[float, float, float, float], ...]


def dirichlet_energy(c: LazyChain, f) -> float:
    """``(1/2) sum_{v,w} (f(v)-f(w))^2 pi(v) P(v,w)``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (c.n,):
        raise ValueError("f must have one entry per state")
    K = c.kernel.tocoo()
    diff = f[K.row] - f[K.col]
    return 0.5 * float(np.sum(diff * diff * c.pi[K.row] * K.data))


def variance_ratio(c: LazyChain, f) -> float:
    """``E(f,f) / Var_pi(f)``."""
    f = np.asarray(f, dtype=float)
    mean = float(c.pi @ f)
    var = float(c.pi @ (f - mean) ** 2)
    return dirichlet_energy(c, f) / var


def _components(Q: sp.csr_matrix, S: np.ndarray) -> list[np.ndarray]:
    sub = Q[S][:, S]
    k, labels = sp.csgraph.connected_components(sub, directed=False)
    return [S[labels == j] for j in range(k)]


def _perron_symmetric(A: np.ndarray, tol: float, budget: int) -> tuple[float, np.ndarray]:
    """Perron pair of a nonnegative symmetric matrix by power iteration on (I + A)/2.

    The iterate B^N 1 is built by repeated squaring first, then polished by plain
    steps until the eigen-residual drops below ``tol``.
    """
    k = A.shape[0]
    B = 0.5 * (A + np.eye(k))
    start = np.full(k, 1.0 / math.sqrt(k))

    def residual(v):
        Bv = B @ v
        return float(np.linalg.norm(Bv - (v @ Bv) * v))

    M = B.copy()
    v = start
    steps = 1
    while steps < budget:
        M = M @ M
        M /= M.max()
        steps *= 2
        v = M @ start
        v /= np.linalg.norm(v)
        if residual(v) < tol:
            break
    for _ in range(budget):
        r = residual(v)
        if r < tol:
            return 2.0 * float(v @ B @ v) - 1.0, v
        v = B @ v
        v /= np.linalg.norm(v)
    raise SpectralError(f"power iteration did not converge (residual {r:.3e})")


def lambda_of_set(
    c: LazyChain,
    S: Iterable[int],
    Q: LazyChain | None = None,
    tol: float = POWER_TOL,
    budget: int = POWER_BUDGET,
) -> SetSpectrum:
    """Set spectrum of ``S`` with an exit-time cross-check.

    The Perron value of Q on each Q-connected piece of S comes from power iteration
    on the symmetrised block; lambda is the minimum over pieces. Started from the
    quasi-stationary law nu the exit time is geometric, so E_nu[exit] = 1/lambda.
    """
    S = np.array(sorted(set(int(v) for v in S)), dtype=np.int64)
    if S.size == 0 or S.size >= c.n:
        raise ValueError("S must be a nonempty proper subset")
    Q = additive_reversibilization(c) if Q is None else Q
    Qd = np.asarray(Q.dense)
    sq = np.sqrt(c.pi)
    best = None
    for comp in _components(Q.kernel, S):
        A = Qd[np.ix_(comp, comp)] * sq[comp][:, None] / sq[comp][None, :]
        A = 0.5 * (A + A.T)
        rho, vec = _perron_symmetric(A, tol, budget)
        if best is None or rho > best[0]:
            best = (rho, comp, np.abs(vec))
    rho, comp, vec = best
    nu = np.zeros(c.n)
    nu[comp] = vec * sq[comp]
    nu /= nu.sum()
    QS = Qd[np.ix_(S, S)]
    h = np.linalg.solve(np.eye(S.size) - QS, np.ones(S.size))
    mean_exit = float(nu[S] @ h)
    return SetSpectrum(tuple(S.tolist()), 1.0 - rho, rho, nu, 1.0 / mean_exit, float(h.max()))


def _connected_mask(mask: int, nbr: list[int]) -> bool:
    low = mask & -mask
    seen = low
    frontier = low
    while frontier:
        v = frontier.bit_length() - 1
        frontier &= ~(1 << v)
        new = nbr[v] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def spectral_profile(c: LazyChain, mode: str = "exact") -> SpectralProfile:
    """Lower envelope of lambda(S) against pi(S) over nonempty proper subsets.

    ``connected_only`` skips subsets that are disconnected under Q: their lambda is
    the minimum over pieces of no larger mass, so the envelope is unchanged.
    """
    if mode not in ("exact", "connected_only"):
        raise ValueError("mode must be 'exact' or 'connected_only'")
    n = c.n
    if n > EXACT_MAX_N:
        raise ValueError(f"subset enumeration limited to n <= {EXACT_MAX_N}")
    if n < 2:
        raise ValueError("profile needs at least two states")
    Q = additive_reversibilization(c)
    Qd = np.asarray(Q.dense)
    nbr = [0] * n
    for x in range(n):
        for y in np.flatnonzero(Qd[x] > 0):
            if y != x:
                nbr[x] |= 1 << int(y)
    entries = []
    for mask in range(1, (1 << n) - 1):
        if mode == "connected_only" and not _connected_mask(mask, nbr):
            continue
        S = [v for v in range(n) if mask >> v & 1]
        spec = lambda_of_set(c, S, Q=Q)
        entries.append((float(c.pi[S].sum()), spec.lam, spec.subset))
    entries.sort(key=lambda e: (e[0], e[1]))
    masses, values, wit = [], [], []
    for r, lam, S in entries:
        if not values or lam < values[-1] - 1e-15:
            if masses and abs(r - masses[-1]) < 1e-15:
                values[-1], wit[-1] = lam, S
            else:
                masses.append(r)
                values.append(lam)
                wit.append(S)
    return SpectralProfile(
        np.array(masses), np.array(values), tuple(wit), c.pi_star, len(entries)
    )


def gmt_bound(c: LazyChain, a: float, profile: SpectralProfile | None = None) -> GMTBound:
    """``2 * ceil( integral_{4 pi_*}^{4/a} dr / (delta r Lambda(r)) )``.

    Lambda is the step function of the profile, held at its last value for r beyond
    the largest proper-subset mass. Each step contributes log(hi/lo) / (delta Lambda).
    """
    delta = c.delta
    if delta <= 0.0:
        raise ValueError("the bound requires P(x,x) >= delta > 0 at every state")
    if a <= 0.0:
        raise ValueError("a must be positive")
    prof = spectral_profile(c, "connected_only") if profile is None else profile
    lo_lim, hi_lim = 4.0 * prof.pi_star, 4.0 / a
    if lo_lim >= hi_lim:
        raise ValueError("empty integration range: need 4 pi_* < 4/a")
    edges = list(prof.masses) + [math.inf]
    total = 0.0
    trace = []
    for i, lam in enumerate(prof.values):
        lo = max(edges[i], lo_lim)
        hi = min(edges[i + 1], hi_lim)
        if hi <= lo:
            continue
        part = math.log(hi / lo) / (delta * lam)
        total += part
        trace.append((lo, hi, float(lam), part))
    return GMTBound(a, delta, total, 2 * math.ceil(total), tuple(trace))


def short_time_bound(n: int, m: int, t: int, regular: bool = False, C: float = 1.0) -> float:
    """Deviation envelope ``C m / sqrt(t)`` up to t = n^2 and ``C m n / t`` after.

    Regular graphs use ``C n / sqrt(t)`` at every t.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    if regular:
        return C * n / math.sqrt(t)
    return C * m / math.sqrt(t) if t <= n * n else C * m * n / t
