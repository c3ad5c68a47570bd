"""Finite non-oriented metric graphs and their directed-edge shift spaces.

A metric graph is a connected graph with all vertex valences >= 3 (loops
count twice) and positive edge lengths.  Its geodesic flow is coded by the
directed-edge subshift: symbols are the two orientations of each edge, and a
directed edge e' may follow e iff head(e) = tail(e') and e' is not the
reversal of e.  Closed geodesics are cyclic admissible words; the exact
enumeration routines here are the brute-force oracle layer for the spectral
machinery in :mod:`graphtherm.thermo`.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import accel
from .errors import (
    GraphThermError,
    InputFormatError,
    InvalidGraphError,
    ResourceLimitError,
)

__all__ = [
    "MetricGraph",
    "TransitionStructure",
    "ClosedGeodesic",
    "build_transition_structure",
    "build_shift",
    "enumerate_closed_geodesics",
    "count_periodic_sequences",
    "geodesic_length",
    "reversed_geodesic",
    "load_graph",
    "graph_to_dict",
    "graph_from_dict",
]

DEFAULT_ENUMERATION_CAP = 5_000_000


@dataclass(frozen=True)
class MetricGraph:
    """Undirected graph with named edges and a positive length per edge.

    ``edges`` is a tuple of (u, v, name); vertices are integers
    0..num_vertices-1.  Loops (u == v) are allowed and count twice toward the
    valence.
    """

    num_vertices: int
    edges: tuple
    lengths: dict

    def __post_init__(self):
        if self.num_vertices < 1:
            raise InvalidGraphError("graph needs at least one vertex")
        names = [name for (_, _, name) in self.edges]
        if len(set(names)) != len(names):
            raise InvalidGraphError("edge names must be unique")
        for u, v, name in self.edges:
            for w in (u, v):
                if not (0 <= w < self.num_vertices):
                    raise InvalidGraphError(
                        f"edge {name!r}: endpoint {w} outside 0..{self.num_vertices - 1}"
                    )
            if name not in self.lengths:
                raise InvalidGraphError(f"edge {name!r} has no length")
        for name, value in self.lengths.items():
            if name not in names:
                raise InvalidGraphError(f"length given for unknown edge {name!r}")
            if not (value > 0) or not math.isfinite(value):
                raise InvalidGraphError(
                    f"edge {name!r}: length must be positive, got {value!r}"
                )
        for v in range(self.num_vertices):
            if self.valence(v) < 3:
                raise InvalidGraphError(
                    f"vertex {v}: valence below 3 (got {self.valence(v)})"
                )
        if not self._connected():
            raise InvalidGraphError("graph is not connected")

    def valence(self, v):
        total = 0
        for u, w, _ in self.edges:
            if u == v:
                total += 1
            if w == v:
                total += 1
        return total

    def _connected(self):
        seen = {0}
        frontier = [0]
        nbrs = {v: set() for v in range(self.num_vertices)}
        for u, v, _ in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        while frontier:
            v = frontier.pop()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == self.num_vertices

    @property
    def edge_names(self):
        return tuple(sorted(name for (_, _, name) in self.edges))

    def volume(self):
        return float(sum(self.lengths.values()))

    def with_lengths(self, lengths):
        """Same topology with a new metric."""
        return MetricGraph(self.num_vertices, self.edges, dict(lengths))


@dataclass(frozen=True, eq=False)
class TransitionStructure:
    """A subshift of finite type with an involutive symbol reversal.

    For a metric graph the symbols are directed edges named ``+e`` / ``-e``
    in sorted edge order; the same class also carries the cut-arc codings
    built in :mod:`graphtherm.coding`.  ``adjacency[i, j] = 1`` iff symbol j
    may follow symbol i; reversal is a fixed-point-free involution and
    ``adjacency[i, reversal[i]] = 0``.
    """

    symbols: tuple
    adjacency: np.ndarray
    reversal: np.ndarray
    irreducible: bool
    period: int
    graph: MetricGraph | None = field(default=None, repr=False)

    def __post_init__(self):
        self.adjacency.setflags(write=False)
        self.reversal.setflags(write=False)

    @property
    def num_symbols(self):
        return len(self.symbols)

    @property
    def aperiodic(self):
        return self.irreducible and self.period == 1

    def index(self, symbol):
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise GraphThermError(f"unknown symbol {symbol!r}") from None

    def reverse_symbol(self, symbol):
        return self.symbols[self.reversal[self.index(symbol)]]

    def admissible_words(self, depth):
        """All admissible words of the given depth, in index-lex order."""
        if depth < 1:
            raise GraphThermError("word depth must be >= 1")
        k = self.num_symbols
        words = [(i,) for i in range(k)]
        for _ in range(depth - 1):
            words = [
                w + (j,) for w in words for j in range(k) if self.adjacency[w[-1], j]
            ]
        return [tuple(self.symbols[i] for i in w) for w in words]

    def word_indices(self, word):
        return tuple(self.index(s) for s in word)


def _strong_connectivity_and_period(adj):
    """(strongly connected?, gcd of cycle lengths) for a 0/1 digraph."""
    k = adj.shape[0]

    def reach(mat):
        seen = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for j in np.nonzero(mat[i])[0]:
                if j not in seen:
                    seen.add(int(j))
                    frontier.append(int(j))
        return seen

    if len(reach(adj)) != k or len(reach(adj.T)) != k:
        return False, 0
    # period: gcd of level[u] + 1 - level[v] over edges u -> v, levels from BFS
    level = {0: 0}
    frontier = [0]
    g = 0
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.nonzero(adj[u])[0]:
                v = int(v)
                if v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    for u in range(k):
        for v in np.nonzero(adj[u])[0]:
            g = math.gcd(g, level[u] + 1 - level[int(v)])
    return True, abs(g)


def build_transition_structure(graph: MetricGraph) -> TransitionStructure:
    """Directed-edge shift of a metric graph.

    Symbols are ordered by sorted edge name, ``+`` before ``-``.  Raises
    :class:`InvalidGraphError` for graphs violating the metric-graph
    invariants (the :class:`MetricGraph` constructor already enforces them).
    """
    by_name = {name: (u, v) for (u, v, name) in graph.edges}
    names = graph.edge_names
    symbols = []
    tails = []
    heads = []
    for name in names:
        u, v = by_name[name]
        symbols.append("+" + name)
        tails.append(u)
        heads.append(v)
        symbols.append("-" + name)
        tails.append(v)
        heads.append(u)
    k = len(symbols)
    reversal = np.array([i + 1 if i % 2 == 0 else i - 1 for i in range(k)], dtype=np.int64)
    adj = np.zeros((k, k), dtype=np.uint8)
    for i in range(k):
        for j in range(k):
            if heads[i] == tails[j] and j != reversal[i]:
                adj[i, j] = 1
    if adj.sum(axis=1).min() < 2:
        raise InvalidGraphError("a directed edge has fewer than 2 continuations")
    irreducible, period = _strong_connectivity_and_period(adj)
    return TransitionStructure(
        symbols=tuple(symbols),
        adjacency=adj,
        reversal=reversal,
        irreducible=irreducible,
        period=period,
        graph=graph,
    )


def build_shift(symbols, adjacency, reversal) -> TransitionStructure:
    """TransitionStructure from explicit data (used by the cut-arc codings)."""
    adj = np.ascontiguousarray(adjacency, dtype=np.uint8)
    rev = np.ascontiguousarray(reversal, dtype=np.int64)
    irreducible, period = _strong_connectivity_and_period(adj)
    return TransitionStructure(
        symbols=tuple(symbols),
        adjacency=adj,
        reversal=rev,
        irreducible=irreducible,
        period=period,
    )


@dataclass(frozen=True)
class ClosedGeodesic:
    """Cyclic admissible word in canonical form (minimal rotation).

    ``word`` holds directed-edge symbols; ``primitive`` is False when the
    word is a proper power of a shorter cyclic word.
    """

    word: tuple
    primitive: bool

    @property
    def period(self):
        return len(self.word)

    @property
    def primitive_period(self):
        for d in range(1, self.period + 1):
            if self.period % d == 0 and self.word == self.word[:d] * (self.period // d):
                return d
        return self.period  # unreachable


def predicted_sequence_count(ts: TransitionStructure, max_period: int) -> float:
    """Upper bound sum(trace(A^p), p <= max_period) used by the resource guard."""
    a = ts.adjacency.astype(np.float64)
    power = np.eye(ts.num_symbols)
    total = 0.0
    for _ in range(max_period):
        power = power @ a
        total += float(np.trace(power))
    return total


def enumerate_closed_geodesics(
    ts: TransitionStructure, max_period: int, cap: int = DEFAULT_ENUMERATION_CAP
):
    """All oriented closed geodesics of period <= max_period.

    Returns cyclic words up to rotation, proper powers included and tagged
    via ``primitive``.  Ordering is deterministic: by period, then by word in
    symbol-index order.  Refuses with :class:`ResourceLimitError` when the
    predicted number of periodic sequences exceeds ``cap``.
    """
    if max_period < 0:
        raise GraphThermError("max_period must be >= 0")
    if max_period == 0:
        return ()
    if predicted_sequence_count(ts, max_period) > cap:
        raise ResourceLimitError(
            f"predicted periodic-sequence count exceeds cap {cap}"
        )
    flat, offs, truncated = accel.enumerate_cycles(ts.adjacency, max_period, cap)
    if truncated:
        raise ResourceLimitError(f"enumeration exceeded cap {cap}")
    out = []
    for a, b in zip(offs[:-1], offs[1:]):
        idx = tuple(int(i) for i in flat[a:b])
        p = len(idx)
        primitive = True
        for d in range(1, p):
            if p % d == 0 and idx == idx[:d] * (p // d):
                primitive = False
                break
        out.append(
            ClosedGeodesic(
                word=tuple(ts.symbols[i] for i in idx), primitive=primitive
            )
        )
    return tuple(out)


def count_periodic_sequences(ts: TransitionStructure, period: int, cap=DEFAULT_ENUMERATION_CAP):
    """Number of fixed points of the period-th shift power, by enumeration.

    Each cyclic word of period p contributes its number of distinct
    rotations (= its primitive period); the total equals trace(A^p), which
    is what the test suite checks it against.
    """
    total = 0
    for g in enumerate_closed_geodesics(ts, period, cap=cap):
        if g.period == period:
            total += g.primitive_period
    return total


def geodesic_length(g: ClosedGeodesic, graph: MetricGraph) -> float:
    """Sum of traversed edge lengths, with multiplicity."""
    total = 0.0
    for symbol in g.word:
        name = symbol[1:]
        if symbol[0] not in "+-" or name not in graph.lengths:
            raise GraphThermError(
                f"geodesic symbol {symbol!r} does not match an edge of the graph"
            )
        total += graph.lengths[name]
    return total


def _canonical_rotation(indices):
    p = len(indices)
    best = tuple(indices)
    for r in range(1, p):
        rot = tuple(indices[r:] + indices[:r])
        if rot < best:
            best = rot
    return best


def reversed_geodesic(g: ClosedGeodesic, ts: TransitionStructure) -> ClosedGeodesic:
    """Orientation reversal, re-canonicalised; an involution on geodesics."""
    rev_idx = [int(ts.reversal[ts.index(s)]) for s in reversed(g.word)]
    word = tuple(ts.symbols[i] for i in _canonical_rotation(rev_idx))
    return ClosedGeodesic(word=word, primitive=g.primitive)


# ---------------------------------------------------------------------------
# JSON interface: {"vertices": n, "edges": [[u, v, "name", length], ...]}
# ---------------------------------------------------------------------------


def graph_from_dict(data) -> MetricGraph:
    if not isinstance(data, dict):
        raise InputFormatError("graph file: top level must be an object")
    if "vertices" not in data:
        raise InputFormatError("graph file: missing key 'vertices'")
    if "edges" not in data:
        raise InputFormatError("graph file: missing key 'edges'")
    n = data["vertices"]
    if not isinstance(n, int) or n < 1:
        raise InputFormatError("graph file: 'vertices' must be a positive integer")
    edges = []
    lengths = {}
    raw = data["edges"]
    if not isinstance(raw, list):
        raise InputFormatError("graph file: 'edges' must be a list")
    for pos, item in enumerate(raw):
        where = f"edges[{pos}]"
        if not (isinstance(item, list) and len(item) == 4):
            raise InputFormatError(f"graph file: {where} must be [u, v, name, length]")
        u, v, name, length = item
        if not isinstance(u, int) or not isinstance(v, int):
            raise InputFormatError(f"graph file: {where}: endpoints must be integers")
        if not isinstance(name, str):
            raise InputFormatError(f"graph file: {where}: name must be a string")
        if not isinstance(length, (int, float)) or isinstance(length, bool):
            raise InputFormatError(f"graph file: {where}: length must be a number")
        edges.append((u, v, name))
        lengths[name] = float(length)
    try:
        return MetricGraph(num_vertices=n, edges=tuple(edges), lengths=lengths)
    except InvalidGraphError as exc:
        raise InputFormatError(f"graph file: {exc}") from exc


def load_graph(path) -> MetricGraph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read graph file {path}: {exc}") from exc
    return graph_from_dict(data)


def graph_to_dict(graph: MetricGraph):
    return {
        "vertices": graph.num_vertices,
        "edges": [[u, v, name, graph.lengths[name]] for (u, v, name) in graph.edges],
    }
