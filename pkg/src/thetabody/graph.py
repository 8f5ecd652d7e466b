"""Simple undirected graphs and brute-force combinatorial oracles.

Vertices are labelled 1..n in the public API; index 0 is reserved for the
lifted coordinate of theta-body matrices.  Internally everything is stored
0-based (vertex ``i`` lives at position ``i - 1``) and vertex sets are
Python ints used as bit masks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GraphError",
    "ENUM_LIMIT",
    "parse_dimacs",
    "to_dimacs",
    "complement",
    "enumerate_stable_sets",
    "enumerate_cliques",
    "maximal_stable_sets",
    "maximal_cliques",
    "alpha",
    "best_stable_set",
    "mask_to_vertices",
    "vertices_to_mask",
    "indicator",
    "cycle",
    "complete",
    "empty",
    "petersen",
    "random_graph",
    "induced_subgraph",
]

ENUM_LIMIT = 24
MAX_ORDER = 64


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Graph on vertices 1..n.  ``edges`` holds pairs (i, j) with i < j."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ORDER:
            raise GraphError(f"vertex count {self.n} outside 1..{MAX_ORDER}")
        clean = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise GraphError(f"edge {e} out of range for n={self.n}")
            clean.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def pairs(self):
        """All unordered pairs (i, j), i < j, 1-based."""
        return itertools.combinations(range(1, self.n + 1), 2)

    def non_edges(self) -> frozenset:
        return frozenset(p for p in self.pairs() if p not in self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for i, j in self.edges:
            a[i - 1, j - 1] = a[j - 1, i - 1] = 1.0
        return a

    def neighbor_masks(self) -> list[int]:
        nb = [0] * self.n
        for i, j in self.edges:
            nb[i - 1] |= 1 << (j - 1)
            nb[j - 1] |= 1 << (i - 1)
        return nb

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def parse_dimacs(text) -> Graph:
    """Parse the DIMACS edge format.  Accepts ``str`` or ``bytes``."""
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    n = None
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphError(f"line {lineno}: malformed header {line!r}")
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise GraphError(f"line {lineno}: malformed header {line!r}") from None
            if not 1 <= n <= MAX_ORDER:
                raise GraphError(f"line {lineno}: vertex count {n} unsupported")
        elif parts[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before header")
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: malformed edge {line!r}")
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: malformed edge {line!r}") from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise GraphError(f"line {lineno}: vertex index out of range")
            if i == j:
                raise GraphError(f"line {lineno}: self-loop at vertex {i}")
            edges.add((min(i, j), max(i, j)))
        else:
            raise GraphError(f"line {lineno}: unknown line type {parts[0]!r}")
    if n is None:
        raise GraphError("missing 'p edge n m' header")
    return Graph(n, frozenset(edges))


def to_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.m}"]
    lines += [f"e {i} {j}" for i, j in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def complement(g: Graph) -> Graph:
    return Graph(g.n, g.non_edges())


def _guard(g: Graph):
    if g.n > ENUM_LIMIT:
        raise GraphError(f"enumeration limited to n <= {ENUM_LIMIT}, got {g.n}")


def _stable_masks(g: Graph) -> list[int]:
    # grow sets by adding vertices larger than the current maximum
    nb = g.neighbor_masks()
    out = [0]
    stack = [(0, 0, -1)]  # (mask, forbidden, last)
    while stack:
        mask, forbidden, last = stack.pop()
        for v in range(last + 1, g.n):
            if not (forbidden >> v) & 1:
                m2 = mask | (1 << v)
                out.append(m2)
                stack.append((m2, forbidden | nb[v], v))
    out.sort(key=lambda m: (bin(m).count("1"), m))
    return out


def enumerate_stable_sets(g: Graph) -> list[int]:
    """All stable sets (including the empty set) as bit masks."""
    _guard(g)
    return _stable_masks(g)


def enumerate_cliques(g: Graph) -> list[int]:
    _guard(g)
    return _stable_masks(complement(g))


def maximal_stable_sets(g: Graph) -> list[int]:
    _guard(g)
    nb = g.neighbor_masks()
    full = (1 << g.n) - 1
    res = []
    for s in _stable_masks(g):
        covered = s
        for v in range(g.n):
            if (s >> v) & 1:
                covered |= nb[v]
        if covered == full:
            res.append(s)
    return res


def maximal_cliques(g: Graph) -> list[int]:
    return maximal_stable_sets(complement(g))


def mask_to_vertices(mask: int) -> list[int]:
    out, v = [], 1
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def vertices_to_mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << (v - 1)
    return m


def indicator(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=float)


def _check_weights(g: Graph, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (g.n,):
        raise GraphError(f"weight vector has shape {w.shape}, expected ({g.n},)")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise GraphError("weights must be finite and nonnegative")
    return w


def best_stable_set(g: Graph, w) -> tuple[float, int]:
    """Maximum weight stable set: (value, mask)."""
    w = _check_weights(g, w)
    _guard(g)
    best, arg = 0.0, 0
    for s in maximal_stable_sets(g):
        val = float(sum(w[i - 1] for i in mask_to_vertices(s)))
        if val > best:
            best, arg = val, s
    return best, arg


def alpha(g: Graph, w=None) -> float:
    """Weighted stability number; ``w`` defaults to all ones."""
    if w is None:
        w = np.ones(g.n)
    return best_stable_set(g, w)[0]


# --- generators -----------------------------------------------------------

def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycles need n >= 3")
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(1, n + 1), 2))


def empty(n: int) -> Graph:
    return Graph(n, frozenset())


def petersen() -> Graph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def random_graph(n: int, p: float, rng) -> Graph:
    """Erdos-Renyi G(n, p) drawn from a numpy Generator."""
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    keep = rng.random(len(pairs)) < p
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])


def induced_subgraph(g: Graph, keep: Sequence[int]) -> Graph:
    """Subgraph on the 1-based vertices ``keep``, relabelled 1..len(keep)."""
    pos = {v: k + 1 for k, v in enumerate(keep)}
    edges = [(pos[i], pos[j]) for i, j in g.edges if i in pos and j in pos]
    return Graph.from_edges(len(keep), edges)
