"""Cut-arc coding of the geodesic flow of a metric graph.

Removing a set of edges whose complement is a spanning tree cuts the graph
to a tree, and geodesics are coded by their crossings of the removed (cut)
edges: symbols are the two orientations of each cut edge, and any symbol may
follow any other except its own reversal, because the connecting path inside
the tree is unique and automatically backtracking-free.  Cutting each edge
at its midpoint turns a metric into a depth-2 potential on this coding:
the value on a symbol pair is half the first cut edge, plus the tree path
between the crossings, plus half the second cut edge.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GraphThermError
from .graphs import MetricGraph, TransitionStructure, build_shift
from .thermo import Potential

__all__ = ["graph_cut_system", "midpoint_coding", "MidpointCoding", "no_backtrack_shift"]


def _spanning_tree(graph: MetricGraph):
    """Lexicographically minimal spanning tree (Kruskal over sorted edge names)."""
    by_name = {name: (u, v) for (u, v, name) in graph.edges}
    parent = list(range(graph.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for name in graph.edge_names:
        u, v = by_name[name]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.append(name)
    return tuple(tree)


def graph_cut_system(graph: MetricGraph):
    """Edges not in the minimal spanning tree; cutting them leaves a tree."""
    tree = set(_spanning_tree(graph))
    return tuple(name for name in graph.edge_names if name not in tree)


def no_backtrack_shift(base_names) -> TransitionStructure:
    """Shift on symbols +n/-n for each base name, y' follows y iff y' != y^-1."""
    symbols = []
    for name in base_names:
        symbols.append("+" + name)
        symbols.append("-" + name)
    k = len(symbols)
    reversal = np.array(
        [i + 1 if i % 2 == 0 else i - 1 for i in range(k)], dtype=np.int64
    )
    adj = np.ones((k, k), dtype=np.uint8)
    for i in range(k):
        adj[i, reversal[i]] = 0
    return build_shift(symbols, adj, reversal)


@dataclass(frozen=True, eq=False)
class MidpointCoding:
    """Coding data for a graph cut system.

    ``tree_paths[(y, y')]`` is the tuple of tree edge names a geodesic
    traverses between crossing cut edge y and cut edge y' (midpoint to
    midpoint); ``shift`` is the no-backtracking shift on the cut symbols.
    """

    graph: MetricGraph = field(repr=False)
    cut_edges: tuple
    tree_edges: tuple
    shift: TransitionStructure = field(repr=False)
    tree_paths: dict = field(repr=False)

    def potential(self, per_edge) -> Potential:
        """Depth-2 potential on the coding from per-edge values.

        Each value is half the entering cut edge, the full tree path, and
        half the exiting cut edge, matching the midpoint cut convention.
        """
        values = {}
        for (y, y2), path in self.tree_paths.items():
            total = 0.5 * per_edge[y[1:]] + 0.5 * per_edge[y2[1:]]
            for name in path:
                total += per_edge[name]
            values[(y, y2)] = float(total)
        return Potential(2, values)

    def length_potential(self) -> Potential:
        return self.potential(self.graph.lengths)

    def closed_word_length(self, word, per_edge=None) -> float:
        """Total metric length of the closed geodesic realising a cyclic word."""
        per_edge = self.graph.lengths if per_edge is None else per_edge
        pot = self.potential(per_edge)
        total = 0.0
        for i, y in enumerate(word):
            y2 = word[(i + 1) % len(word)]
            total += pot.value((y, y2))
        return total


def midpoint_coding(graph: MetricGraph, cut_edges=None) -> MidpointCoding:
    """Build the midpoint coding for a cut system (default: minimal one)."""
    if cut_edges is None:
        cut_edges = graph_cut_system(graph)
    cut_edges = tuple(sorted(cut_edges))
    names = set(graph.edge_names)
    unknown = [c for c in cut_edges if c not in names]
    if unknown:
        raise GraphThermError(f"cut edge {unknown[0]!r} is not an edge of the graph")
    tree_edges = tuple(n for n in graph.edge_names if n not in set(cut_edges))
    # the complement must be a spanning tree
    if len(tree_edges) != graph.num_vertices - 1:
        raise GraphThermError(
            f"cut system complement has {len(tree_edges)} edges, "
            f"expected {graph.num_vertices - 1} for a spanning tree"
        )
    by_name = {name: (u, v) for (u, v, name) in graph.edges}
    nbrs = {v: [] for v in range(graph.num_vertices)}
    for name in tree_edges:
        u, v = by_name[name]
        if u == v:
            raise GraphThermError(f"tree edge {name!r} is a loop; cut system invalid")
        nbrs[u].append((v, name))
        nbrs[v].append((u, name))
    # tree connectivity check via BFS from vertex 0
    seen = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for w, _ in nbrs[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    if len(seen) != graph.num_vertices:
        raise GraphThermError("cut system complement is not connected")

    def tree_path(src, dst):
        if src == dst:
            return ()
        prev = {src: None}
        frontier = [src]
        while frontier:
            nxt = []
            for v in frontier:
                for w, name in nbrs[v]:
                    if w not in prev:
                        prev[w] = (v, name)
                        nxt.append(w)
            frontier = nxt
        path = []
        v = dst
        while prev[v] is not None:
            v, name = prev[v]
            path.append(name)
        return tuple(reversed(path))

    shift = no_backtrack_shift(cut_edges)

    def endpoints(symbol):
        u, v = by_name[symbol[1:]]
        return (u, v) if symbol[0] == "+" else (v, u)

    tree_paths = {}
    for i, y in enumerate(shift.symbols):
        for j, y2 in enumerate(shift.symbols):
            if shift.adjacency[i, j]:
                _, head = endpoints(y)
                tail, _ = endpoints(y2)
                tree_paths[(y, y2)] = tree_path(head, tail)
    return MidpointCoding(
        graph=graph,
        cut_edges=cut_edges,
        tree_edges=tree_edges,
        shift=shift,
        tree_paths=tree_paths,
    )
