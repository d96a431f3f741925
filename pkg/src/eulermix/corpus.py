"""Deterministic graph corpus used by the audits and the ``audit-all`` preset.

Every family is generated from fixed seeds. When the ``EULERMIX_CORPUS``
environment variable names a directory, graphs are read from
``<dir>/<family>/*.eul`` instead; :func:`write_corpus` produces that layout.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chain import LazyChain, build
from .graph import (
    GOLDEN,
    EulerianMultigraph,
    GadgetSpec,
    gen_biased_cycle,
    gen_circulant,
    gen_directed_cycle,
    gen_lollipop,
    gen_random_eulerian,
    gen_random_regular,
    gen_torus,
    gen_two_cycle_gadget,
    read_graph,
    validate,
    write_graph,
)

log = logging.getLogger(__name__)

__all__ = [
    "CorpusEntry",
    "FAMILIES",
    "ENV_VAR",
    "SMALL_SIZES",
    "M_FACTORS",
    "LARGE_SIZES",
    "family",
    "small_corpus",
    "load_corpus",
    "write_corpus",
    "is_regular",
]

ENV_VAR = "EULERMIX_CORPUS"
SMALL_SIZES = (4, 5, 6, 8, 10, 12)
M_FACTORS = (1, 2, 4, 8)
LARGE_SIZES = (8, 16, 32, 64)
FAMILIES = ("random_small", "structured_small", "regular", "eulerian")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    family: str
    graph: EulerianMultigraph
    holding: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    def chain(self, holding=None) -> LazyChain:
        """Walk on the entry; ``holding`` overrides the stored laziness (default 1/2)."""
        if holding is None:
            holding = 0.5 if self.holding is None else self.holding
        return build(self.graph, holding, name=self.name)


def _random_small() -> list[CorpusEntry]:
    out = []
    for n in SMALL_SIZES:
        for f in M_FACTORS:
            g = gen_random_eulerian(n, f * n, seed=1000 * n + f)
            out.append(CorpusEntry(f"rand_n{n}_m{f}n", "random_small", g))
    return out


def _structured_small() -> list[CorpusEntry]:
    out = [CorpusEntry(f"cycle_{n}", "structured_small", gen_directed_cycle(n)) for n in (3, 6, 9, 12)]
    out += [
        CorpusEntry(f"biased_{n}", "structured_small", gen_biased_cycle(n, 2, 1)) for n in (5, 8, 12)
    ]
    out += [
        CorpusEntry("circulant_7_1_3", "structured_small", gen_circulant(7, [1, 3])),
        CorpusEntry("circulant_12_1_5", "structured_small", gen_circulant(12, [1, 5])),
        CorpusEntry("torus_3x3", "structured_small", gen_torus(3, 3)),
        CorpusEntry("torus_3x4", "structured_small", gen_torus(3, 4)),
    ]
    out += [
        CorpusEntry(f"regular_{n}_{d}", "structured_small", gen_random_regular(n, d, seed=100 * n + d))
        for n, d in ((6, 2), (8, 3), (12, 4))
    ]
    gd = gen_two_cycle_gadget(GadgetSpec(4, GOLDEN))
    out.append(CorpusEntry("gadget_4_golden", "structured_small", gd.graph, np.array(gd.holding)))
    return out


def _torus_shape(n: int) -> tuple[int, int]:
    r = 1 << (n.bit_length() - 1) // 2
    return r, n // r


def _regular() -> list[CorpusEntry]:
    out = []
    for n in LARGE_SIZES:
        r, cols = _torus_shape(n)
        out += [
            CorpusEntry(f"cycle_{n}", "regular", gen_directed_cycle(n)),
            CorpusEntry(f"circulant_{n}", "regular", gen_circulant(n, [1, n // 4 + 1])),
            CorpusEntry(f"torus_{r}x{cols}", "regular", gen_torus(r, cols)),
            CorpusEntry(f"regular_{n}_2", "regular", gen_random_regular(n, 2, seed=100 * n + 2)),
            CorpusEntry(f"regular_{n}_4", "regular", gen_random_regular(n, 4, seed=100 * n + 4)),
        ]
    return out


def _eulerian() -> list[CorpusEntry]:
    out = []
    for n in LARGE_SIZES:
        for f in (2, 4):
            g = gen_random_eulerian(n, f * n, seed=7000 * n + f)
            out.append(CorpusEntry(f"rand_n{n}_m{f}n", "eulerian", g))
        if n >= 16:
            # figure-eight of two biased cycles; only vertex 0 has a different degree
            gd = gen_two_cycle_gadget(GadgetSpec((n + 1) // 2 // 4 * 4, 0.5))
            out.append(CorpusEntry(f"figure8_{gd.graph.n}", "eulerian", gd.graph))
        out.append(CorpusEntry(f"lollipop_{n}", "eulerian", gen_lollipop(n)))
    return out


_BUILDERS = {
    "random_small": _random_small,
    "structured_small": _structured_small,
    "regular": _regular,
    "eulerian": _eulerian,
}


def load_corpus(directory: str | os.PathLike, name: str) -> list[CorpusEntry]:
    """Read every ``*.eul`` file of one family directory, sorted by file name."""
    folder = Path(directory) / name
    if not folder.is_dir():
        raise FileNotFoundError(f"corpus family directory {folder} does not exist")
    out = []
    for path in sorted(folder.glob("*.eul")):
        g, holding = read_graph(path)
        out.append(CorpusEntry(path.stem, name, g, holding))
    return out


def family(name: str) -> list[CorpusEntry]:
    """Entries of one family, from ``$EULERMIX_CORPUS`` when set, else built in."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown corpus family {name!r}; choose from {FAMILIES}")
    directory = os.environ.get(ENV_VAR)
    if directory:
        log.info("loading corpus family %s from %s", name, directory)
        return load_corpus(directory, name)
    return _BUILDERS[name]()


def small_corpus() -> list[CorpusEntry]:
    """All entries with at most 12 vertices."""
    return [e for fam in ("random_small", "structured_small") for e in family(fam) if e.n <= 12]


def write_corpus(directory: str | os.PathLike) -> list[Path]:
    """Materialise the built-in corpus as ``<directory>/<family>/<name>.eul``."""
    written = []
    for name, builder in _BUILDERS.items():
        folder = Path(directory) / name
        folder.mkdir(parents=True, exist_ok=True)
        for e in builder():
            path = folder / f"{e.name}.eul"
            write_graph(path, e.graph, e.holding)
            written.append(path)
    return written


def is_regular(e: CorpusEntry) -> bool:
    return validate(e.graph).regular_degree is not None
