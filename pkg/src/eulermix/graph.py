"""Directed multigraphs, Eulerian validation and the graph families used in experiments.

Vertices are the integers ``0..n-1``. Edges carry a multiplicity so that biased
walks (two forward edges, one backward edge, ...) stay walks on a graph with
integral degrees.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from decimal import Decimal, localcontext

import numpy as np

__all__ = [
    "EulerianMultigraph",
    "ValidationResult",
    "GadgetSpec",
    "Gadget",
    "GraphFormatError",
    "GOLDEN",
    "GOLDEN_DECIMAL",
    "validate",
    "is_strongly_connected",
    "gen_directed_cycle",
    "gen_biased_cycle",
    "gen_two_cycle_gadget",
    "gen_random_eulerian",
    "gen_random_regular",
    "gen_circulant",
    "gen_torus",
    "gen_lollipop",
    "reverse",
    "undirected_distance",
    "undirected_distances",
    "format_graph",
    "parse_graph",
    "read_graph",
    "write_graph",
]

with localcontext() as _ctx:
    _ctx.prec = 50
    _SQRT5 = Decimal(5).sqrt()
    GOLDEN_DECIMAL = (_SQRT5 - 1) / 2
    GOLDEN = float(GOLDEN_DECIMAL)
    # the two closed forms of the laziness parameter coincide
    assert abs((_SQRT5 - 1) / 2 - 2 / (_SQRT5 + 1)) < Decimal(10) ** -45


class GraphFormatError(ValueError):
    """Raised when a graph file cannot be parsed."""


@dataclass(frozen=True)
class EulerianMultigraph:
    """Directed multigraph on ``n`` vertices.

    ``out_adj[v]`` is a tuple of ``(target, multiplicity)`` pairs sorted by target.
    The class does not insist on the Eulerian property; use :func:`validate`.
    """

    n: int
    out_adj: tuple[tuple[tuple[int, int], ...], ...]
    out_degree: np.ndarray = field(init=False, repr=False, compare=False)
    in_degree: np.ndarray = field(init=False, repr=False, compare=False)
    m: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        if len(self.out_adj) != self.n:
            raise ValueError("out_adj must have one entry per vertex")
        outd = np.zeros(self.n, dtype=np.int64)
        ind = np.zeros(self.n, dtype=np.int64)
        for u, row in enumerate(self.out_adj):
            for v, mult in row:
                if not 0 <= v < self.n:
                    raise ValueError(f"edge {u}->{v} leaves the vertex range")
                if mult < 1:
                    raise ValueError(f"edge {u}->{v} has multiplicity {mult}")
                outd[u] += mult
                ind[v] += mult
        outd.setflags(write=False)
        ind.setflags(write=False)
        object.__setattr__(self, "out_degree", outd)
        object.__setattr__(self, "in_degree", ind)
        object.__setattr__(self, "m", int(outd.sum()))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, ...]]) -> EulerianMultigraph:
        """Build from ``(u, v)`` or ``(u, v, mult)`` tuples; repeated pairs accumulate."""
        acc: list[dict[int, int]] = [dict() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            mult = int(e[2]) if len(e) > 2 else 1
            if not 0 <= u < n:
                raise ValueError(f"edge {u}->{v} leaves the vertex range")
            acc[u][v] = acc[u].get(v, 0) + mult
        return cls(n, tuple(tuple(sorted(d.items())) for d in acc))

    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, v, k) for u, row in enumerate(self.out_adj) for v, k in row]

    def multiplicity(self, u: int, v: int) -> int:
        for w, k in self.out_adj[u]:
            if w == v:
                return k
        return 0

    @property
    def has_self_loops(self) -> bool:
        return any(v == u for u, row in enumerate(self.out_adj) for v, _ in row)

    def undirected_neighbors(self) -> list[list[int]]:
        """Distinct neighbours of each vertex ignoring orientation and multiplicity."""
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v, _ in self.edges():
            if u != v:
                nbrs[u].add(v)
                nbrs[v].add(u)
        return [sorted(s) for s in nbrs]

    @property
    def is_eulerian(self) -> bool:
        return bool(np.array_equal(self.out_degree, self.in_degree))

    @property
    def min_degree(self) -> int:
        return int(self.out_degree.min())


@dataclass(frozen=True)
class ValidationResult:
    eulerian: bool
    connected: bool
    regular_degree: int | None


def _undirected_component(g: EulerianMultigraph, source: int) -> np.ndarray:
    return undirected_distances(g, source) >= 0


def validate(g: EulerianMultigraph) -> ValidationResult:
    """Classify ``g``: Eulerian, connected (undirected view), regular degree."""
    eulerian = g.is_eulerian
    connected = bool(_undirected_component(g, 0).all())
    degs = np.concatenate([g.out_degree, g.in_degree])
    regular = int(degs[0]) if np.all(degs == degs[0]) else None
    return ValidationResult(eulerian, connected, regular)


def is_strongly_connected(g: EulerianMultigraph) -> bool:
    """Forward and backward reachability from vertex 0 both cover every vertex."""

    def reach(adj: list[list[int]]) -> int:
        seen = np.zeros(g.n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return int(seen.sum())

    fwd: list[list[int]] = [[] for _ in range(g.n)]
    bwd: list[list[int]] = [[] for _ in range(g.n)]
    for u, v, _ in g.edges():
        fwd[u].append(v)
        bwd[v].append(u)
    return reach(fwd) == g.n and reach(bwd) == g.n


# ----------------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------------


def gen_directed_cycle(n: int) -> EulerianMultigraph:
    if n < 2:
        raise ValueError("a directed cycle needs n >= 2")
    return EulerianMultigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gen_biased_cycle(n: int, forward_mult: int, backward_mult: int) -> EulerianMultigraph:
    """Cycle Z_n with ``forward_mult`` edges i -> i+1 and ``backward_mult`` edges i -> i-1.

    With laziness 1/2 the (2, 1) case is the walk stepping +1 w.p. 1/3 and -1 w.p. 1/6.
    """
    if n < 3:
        raise ValueError("biased cycle needs n >= 3")
    if forward_mult < 1 or backward_mult < 1:
        raise ValueError("multiplicities must be >= 1")
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n, forward_mult))
        edges.append((i, (i - 1) % n, backward_mult))
    return EulerianMultigraph.from_edges(n, edges)


def gen_circulant(n: int, jumps: Iterable[int]) -> EulerianMultigraph:
    """Directed circulant: every i has one edge to i+j for each jump j (regular, Eulerian)."""
    jumps = list(jumps)
    if any(j % n == 0 for j in jumps):
        raise ValueError("jumps must be nonzero mod n")
    return EulerianMultigraph.from_edges(n, [(i, (i + j) % n) for i in range(n) for j in jumps])


def gen_torus(rows: int, cols: int) -> EulerianMultigraph:
    """Directed torus: each cell points right and down (2-regular)."""
    n = rows * cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            edges.append((u, r * cols + (c + 1) % cols))
            edges.append((u, ((r + 1) % rows) * cols + c))
    return EulerianMultigraph.from_edges(n, edges)


def gen_lollipop(n: int) -> EulerianMultigraph:
    """Bidirected clique on the first ceil(n/2) vertices with a bidirected path hanging off it."""
    if n < 3:
        raise ValueError("lollipop needs n >= 3")
    k = (n + 1) // 2
    edges = [(u, v) for u in range(k) for v in range(k) if u != v]
    for v in range(k, n):
        edges += [(v - 1, v), (v, v - 1)]
    return EulerianMultigraph.from_edges(n, edges)


def _random_cycle_edges(rng: np.random.Generator, verts: np.ndarray) -> list[tuple[int, int]]:
    order = rng.permutation(verts)
    k = len(order)
    return [(int(order[i]), int(order[(i + 1) % k])) for i in range(k)]


def gen_random_eulerian(
    n: int, target_m: int, seed: int, max_attempts: int = 1000
) -> EulerianMultigraph:
    """Connected Eulerian digraph built by superposing random directed cycles.

    Each cycle has a uniform length in ``[2, n]`` on uniformly chosen vertices, so
    the result is Eulerian by construction. Cycles are added until ``m >= target_m``;
    a disconnected outcome is discarded and the attempt repeated.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if target_m < n:
        raise ValueError("target_m must be >= n for a connected graph")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        edges: list[tuple[int, int]] = []
        while len(edges) < target_m:
            length = int(rng.integers(2, n + 1))
            verts = rng.choice(n, size=length, replace=False)
            edges.extend(_random_cycle_edges(rng, verts))
        g = EulerianMultigraph.from_edges(n, edges)
        if validate(g).connected:
            return g
    raise RuntimeError(f"no connected graph after {max_attempts} attempts (n={n}, m={target_m})")


def gen_random_regular(n: int, d: int, seed: int, simple: bool = True,
                       max_attempts: int = 1000) -> EulerianMultigraph:
    """d-regular Eulerian digraph: superposition of ``d`` random Hamiltonian cycles.

    With ``simple=True`` cycles that would create a repeated edge are redrawn.
    """
    if n < 3 and d > 1 and simple:
        raise ValueError("no simple d-regular digraph this small")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        used: set[tuple[int, int]] = set()
        edges: list[tuple[int, int]] = []
        ok = True
        for _ in range(d):
            for _ in range(max_attempts):
                cyc = _random_cycle_edges(rng, np.arange(n))
                if not simple or used.isdisjoint(cyc):
                    break
            else:
                ok = False
                break
            used.update(cyc)
            edges.extend(cyc)
        if ok:
            return EulerianMultigraph.from_edges(n, edges)
    raise RuntimeError(f"could not draw a simple {d}-regular digraph on {n} vertices")


@dataclass(frozen=True)
class GadgetSpec:
    """Two biased n-cycles glued at 0, with laziness ``alpha`` on part of the left cycle.

    ``interval`` selects which left-cycle positions i carry ``alpha``:
    ``"closed"`` uses n/4 <= i <= 3n/4 (n/2 + 1 sites), ``"half_open"`` uses
    n/4 <= i < 3n/4 (exactly n/2 sites).
    """

    n: int
    alpha: float
    interval: str = "closed"

    def __post_init__(self) -> None:
        if self.n < 4 or self.n % 4:
            raise ValueError(f"gadget cycle length must be a positive multiple of 4, got {self.n}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if self.interval not in ("closed", "half_open"):
            raise ValueError("interval must be 'closed' or 'half_open'")

    def alpha_position(self, i: int) -> bool:
        """True when cycle position ``i`` (0..n-1) lies in the alpha region."""
        lo, hi = self.n // 4, 3 * self.n // 4
        return lo <= i <= hi if self.interval == "closed" else lo <= i < hi


@dataclass(frozen=True)
class Gadget:
    graph: EulerianMultigraph
    holding: np.ndarray
    landmarks: Mapping[str, int]
    spec: GadgetSpec

    def left(self, i: int) -> int:
        """Vertex id of left-cycle position ``i``."""
        i %= self.spec.n
        return 0 if i == 0 else i

    def right(self, i: int) -> int:
        """Vertex id of right-cycle position ``i``."""
        i %= self.spec.n
        return 0 if i == 0 else self.spec.n - 1 + i


def gen_two_cycle_gadget(spec: GadgetSpec) -> Gadget:
    """Figure-eight graph of two n-cycles sharing vertex 0.

    Left-cycle position i is vertex i (1..n-1), right-cycle position i is vertex
    n-1+i. Every position has 2 clockwise and 1 counter-clockwise edge; vertex 0
    has that pattern into each cycle, hence out-degree 6.
    """
    n = spec.n
    N = 2 * n - 1

    def left(i: int) -> int:
        i %= n
        return 0 if i == 0 else i

    def right(i: int) -> int:
        i %= n
        return 0 if i == 0 else n - 1 + i

    edges = []
    for cyc in (left, right):
        for i in range(n):
            edges.append((cyc(i), cyc(i + 1), 2))
            edges.append((cyc(i), cyc(i - 1), 1))
    g = EulerianMultigraph.from_edges(N, edges)
    holding = np.full(N, 0.5)
    for i in range(1, n):
        if spec.alpha_position(i):
            holding[left(i)] = spec.alpha
    holding.setflags(write=False)
    landmarks = {"zero": 0, "a": left(n // 2), "b": right(n // 2)}
    return Gadget(g, holding, landmarks, spec)


def reverse(g: EulerianMultigraph) -> EulerianMultigraph:
    return EulerianMultigraph.from_edges(g.n, [(v, u, k) for u, v, k in g.edges()])


def undirected_distances(g: EulerianMultigraph, source: int) -> np.ndarray:
    """BFS distances from ``source`` in the undirected view; -1 marks unreachable."""
    nbrs = g.undirected_neighbors()
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def undirected_distance(g: EulerianMultigraph, u: int, v: int) -> int:
    d = int(undirected_distances(g, u)[v])
    if d < 0:
        raise ValueError(f"vertices {u} and {v} are not connected")
    return d


# ----------------------------------------------------------------------------
# Text format
# ----------------------------------------------------------------------------


def format_graph(g: EulerianMultigraph, holding: np.ndarray | None = None) -> str:
    lines = [f"eul {g.n} {g.m}"]
    lines += [f"{u} {v} {k}" for u, v, k in g.edges()]
    if holding is not None:
        lines.append("holding")
        lines += [f"{v} {float(a)!r}" for v, a in enumerate(np.asarray(holding, dtype=float))]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> tuple[EulerianMultigraph, np.ndarray | None]:
    """Parse the ``eul`` text format; returns the graph and the optional holding vector."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows or rows[0][1][0] != "eul" or len(rows[0][1]) != 3:
        raise GraphFormatError("missing 'eul <n> <m>' header")
    try:
        n, m = int(rows[0][1][1]), int(rows[0][1][2])
    except ValueError as exc:
        raise GraphFormatError(f"bad header: {exc}") from None
    if n < 1 or m < 0:
        raise GraphFormatError("header needs n >= 1 and m >= 0")

    edges = []
    holding = None
    i = 1
    while i < len(rows) and rows[i][1][0] != "holding":
        lineno, tok = rows[i]
        if len(tok) != 3:
            raise GraphFormatError(f"line {lineno}: expected '<u> <v> <mult>'")
        try:
            u, v, k = (int(t) for t in tok)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer edge field") from None
        if not (0 <= u < n and 0 <= v < n) or k < 1:
            raise GraphFormatError(f"line {lineno}: edge out of range")
        edges.append((u, v, k))
        i += 1
    if i < len(rows):
        holding = np.full(n, np.nan)
        for lineno, tok in rows[i + 1:]:
            if len(tok) != 2:
                raise GraphFormatError(f"line {lineno}: expected '<v> <a>'")
            try:
                v, a = int(tok[0]), float(tok[1])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: bad holding entry") from None
            if not 0 <= v < n or not 0.0 <= a < 1.0:
                raise GraphFormatError(f"line {lineno}: holding out of range")
            holding[v] = a
        if np.isnan(holding).any():
            raise GraphFormatError("holding section must list every vertex")
    g = EulerianMultigraph.from_edges(n, edges)
    if g.m != m:
        raise GraphFormatError(f"header says m={m} but edges sum to {g.m}")
    return g, holding


def read_graph(path) -> tuple[EulerianMultigraph, np.ndarray | None]:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(path, g: EulerianMultigraph, holding: np.ndarray | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g, holding))
