"""Right-angled hexagons, triangulated bordered surfaces, and holonomy.

A bordered hyperbolic surface cut along a maximal system of disjoint simple
orthogeodesic arcs falls apart into right-angled hexagons, two per unit of
-Euler characteristic.  A complex records the gluing combinatorics: each
hexagon is a cyclic list of six sides alternating between boundary segments
and arcs, each arc shared by exactly two hexagons.  With a marking (an
independent half of the hexagons) the boundary sides of the marked hexagons
are free coordinates: they determine the arc lengths through the hexagon
cosine rule, then the complementary hexagons, and finally a discrete
faithful representation of the fundamental group assembled from hexagons
developed in the upper half-plane.

The cosine rule is evaluated in the rearranged form

    cosh(A) - 1 = (cosh a + cosh(b - c)) / (sinh b sinh c)

(A the side opposite a) which has no cancellation, so the solver stays
accurate in the deep degeneration regime where arc lengths shrink like
2 exp(lambda (b1 - b2 - b3)/2).
"""

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GraphThermError,
    HexagonError,
    InputFormatError,
    NonHyperbolicError,
)
from .graphs import MetricGraph

__all__ = [
    "arccosh1p",
    "solve_hexagon",
    "hexagon_relation_residual",
    "FatGraph",
    "fat_graph_faces",
    "complex_from_fat_graph",
    "TriangulationComplex",
    "make_complex",
    "find_independent_half",
    "cut_system",
    "dual_graph",
    "SurfaceStructure",
    "surface_from_coordinates",
    "geodesic_length_of_word",
    "arc_midpoint_distance",
    "complex_to_dict",
    "complex_from_dict",
    "load_complex",
]


# ---------------------------------------------------------------------------
# Hexagon trigonometry
# ---------------------------------------------------------------------------


def arccosh1p(u: float) -> float:
    """arccosh(1 + u) evaluated stably for small u."""
    if u < 0:
        raise HexagonError(f"arccosh argument below 1 (1 + {u:.3e})")
    return math.log1p(u + math.sqrt(u * (u + 2.0)))


def _opposite(a, b, c):
    u = (math.cosh(a) + math.cosh(b - c)) / (math.sinh(b) * math.sinh(c))
    return arccosh1p(u)


def solve_hexagon(a: float, b: float, c: float):
    """Opposite sides (A, B, C) of the right-angled hexagon with alternating
    sides (a, b, c); cyclic side order is a, C, b, A, c, B."""
    for name, val in (("a", a), ("b", b), ("c", c)):
        if not (val > 0) or not math.isfinite(val):
            raise HexagonError(f"hexagon side {name} must be positive, got {val!r}")
    return _opposite(a, b, c), _opposite(b, c, a), _opposite(c, a, b)


def hexagon_relation_residual(sides) -> float:
    """Max relative residual of the six cosine-rule relations of a hexagon."""
    s = list(sides)
    if len(s) != 6:
        raise HexagonError("a hexagon has six sides")
    worst = 0.0
    for k in range(6):
        lhs = (math.cosh(s[(k + 3) % 6]) - 1.0) * math.sinh(s[(k + 2) % 6]) * math.sinh(
            s[(k + 4) % 6]
        )
        rhs = math.cosh(s[k]) + math.cosh(s[(k + 2) % 6] - s[(k + 4) % 6])
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    return worst


# ---------------------------------------------------------------------------
# SL(2, R) plumbing for the upper half-plane
# ---------------------------------------------------------------------------


def _translation(length):
    e = math.exp(0.5 * length)
    return np.array([[e, 0.0], [0.0, 1.0 / e]])


def _rotation(phi):
    c, s = math.cos(0.5 * phi), math.sin(0.5 * phi)
    return np.array([[c, s], [-s, c]])


_TURN = _rotation(math.pi / 2.0)
_HALF_TURN = _rotation(math.pi)


def _half_turn_about_midpoint(length):
    t = _translation(0.5 * length)
    return t @ _HALF_TURN @ np.array([[1.0 / t[0, 0], 0.0], [0.0, t[0, 0]]])


def _inv(m):
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def _apply(m, z):
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _dist(z, w):
    return arccosh1p(abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def translation_length(m) -> float:
    """Axis translation length 2 arccosh(|tr|/2) of a hyperbolic isometry."""
    tr = abs(float(np.trace(m)))
    if tr <= 2.0:
        raise NonHyperbolicError(
            f"element has |trace| = {tr:.6f} <= 2 (parabolic or elliptic)"
        )
    return 2.0 * arccosh1p(0.5 * tr - 1.0)


# ---------------------------------------------------------------------------
# Fat graphs and the derived hexagon complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FatGraph:
    """Trivalent graph with a cyclic order of edge names at each vertex."""

    cyclic: dict  # vertex -> tuple of 3 edge names
    edges: dict  # edge name -> (u, v), u != v

    def __post_init__(self):
        for name, (u, v) in self.edges.items():
            if u == v:
                raise GraphThermError(f"fat graph edge {name!r} is a loop")
            for w in (u, v):
                if name not in self.cyclic[w]:
                    raise GraphThermError(
                        f"edge {name!r} missing from cyclic order at vertex {w}"
                    )
        for v, order in self.cyclic.items():
            if len(order) != 3 or len(set(order)) != 3:
                raise GraphThermError(f"vertex {v} is not trivalent")

    def other_end(self, name, v):
        u, w = self.edges[name]
        return w if v == u else u


def fat_graph_faces(fat: FatGraph):
    """Boundary walks of the ribbon graph, as lists of corners (v, e_in, e_out).

    Walking a face: arrive at v along e, turn to the next edge in the cyclic
    order, leave along it.  Each corner of each vertex is traversed exactly
    once over all faces.
    """
    directed = [(name, w) for name, (u, v) in sorted(fat.edges.items()) for w in (u, v)]
    # directed edge identified by (name, head vertex)
    visited = set()
    faces = []
    for start in directed:
        if start in visited:
            continue
        walk = []
        cur = start
        while cur not in visited:
            visited.add(cur)
            name, head = cur
            order = fat.cyclic[head]
            nxt = order[(order.index(name) + 1) % 3]
            walk.append((head, name, nxt))
            cur = (nxt, fat.other_end(nxt, head))
        faces.append(tuple(walk))
    return faces


@dataclass(frozen=True, eq=False)
class TriangulationComplex:
    """Gluing combinatorics of an ideal triangulation of a bordered surface.

    ``hexagons[i]`` is a cyclic 6-tuple of sides alternating ("b", segment
    id) and ("a", arc id), starting with a boundary segment.  ``marked`` is
    the independent half of the hexagons whose boundary sides are the free
    coordinates; the coordinate order is ascending segment id.
    """

    genus: int
    boundary_count: int
    hexagons: tuple
    marked: frozenset | None = None

    @property
    def s(self):
        return 2 * self.genus + self.boundary_count - 2

    @property
    def num_hexagons(self):
        return len(self.hexagons)

    def arc_ids(self):
        return tuple(sorted({sid for hx in self.hexagons for (kind, sid) in hx if kind == "a"}))

    def arc_occurrences(self):
        occ = {}
        for h, hx in enumerate(self.hexagons):
            for pos, (kind, sid) in enumerate(hx):
                if kind == "a":
                    occ.setdefault(sid, []).append((h, pos))
        return occ

    def segment_positions(self):
        out = {}
        for h, hx in enumerate(self.hexagons):
            for pos, (kind, sid) in enumerate(hx):
                if kind == "b":
                    out[sid] = (h, pos)
        return out

    def marked_segment_ids(self):
        if self.marked is None:
            raise GraphThermError("complex has no marking")
        return tuple(
            sorted(
                sid
                for h in self.marked
                for (kind, sid) in self.hexagons[h]
                if kind == "b"
            )
        )

    def hexagon_adjacency(self):
        adj = {h: set() for h in range(self.num_hexagons)}
        for sid, occ in self.arc_occurrences().items():
            (h1, _), (h2, _) = occ
            adj[h1].add(h2)
            adj[h2].add(h1)
        return adj

    def boundary_walks(self):
        """Boundary components as tuples of steps (hex, b-pos, arc id crossed,
        hex entered); consecutive steps share the crossed arc."""
        occ = self.arc_occurrences()
        steps = {}
        for h, hx in enumerate(self.hexagons):
            for pos, (kind, sid) in enumerate(hx):
                if kind != "b":
                    continue
                arc_pos = (pos + 1) % 6
                _, arc_id = hx[arc_pos]
                (h1, p1), (h2, p2) = occ[arc_id]
                nxt_hex, nxt_arc_pos = (h2, p2) if (h1, p1) == (h, arc_pos) else (h1, p1)
                steps[(h, pos)] = (arc_id, nxt_hex, (nxt_arc_pos + 1) % 6)
        walks = []
        seen = set()
        for start in sorted(steps):
            if start in seen:
                continue
            walk = []
            cur = start
            while cur not in seen:
                seen.add(cur)
                arc_id, nxt_hex, nxt_pos = steps[cur]
                walk.append((cur[0], cur[1], arc_id, nxt_hex))
                cur = (nxt_hex, nxt_pos)
            walks.append(tuple(walk))
        return walks


def make_complex(genus, boundary_count, hexagon_sides, marked=None) -> TriangulationComplex:
    """Validated TriangulationComplex from raw side data."""
    hexagons = []
    for h, sides in enumerate(hexagon_sides):
        sides = tuple((str(kind), int(sid)) for kind, sid in sides)
        if len(sides) != 6:
            raise GraphThermError(f"hexagon {h}: needs six sides")
        for pos, (kind, _) in enumerate(sides):
            want = "b" if pos % 2 == 0 else "a"
            if kind != want:
                raise GraphThermError(
                    f"hexagon {h}: side {pos} must be {want!r} (alternating, b first)"
                )
        hexagons.append(sides)
    cx = TriangulationComplex(
        genus=int(genus),
        boundary_count=int(boundary_count),
        hexagons=tuple(hexagons),
        marked=None if marked is None else frozenset(int(m) for m in marked),
    )
    s = cx.s
    if s < 1:
        raise GraphThermError("surface must have negative Euler characteristic")
    if cx.num_hexagons != 2 * s:
        raise GraphThermError(
            f"expected {2 * s} hexagons for signature ({genus},{boundary_count}), got {cx.num_hexagons}"
        )
    occ = cx.arc_occurrences()
    if len(occ) != 3 * s:
        raise GraphThermError(f"expected {3 * s} arcs, got {len(occ)}")
    for sid, places in occ.items():
        if len(places) != 2:
            raise GraphThermError(f"arc {sid} appears {len(places)} times, expected 2")
        if places[0][0] == places[1][0]:
            raise GraphThermError(f"arc {sid} glues a hexagon to itself")
    seg_count = {}
    for hx in cx.hexagons:
        for kind, sid in hx:
            if kind == "b":
                seg_count[sid] = seg_count.get(sid, 0) + 1
    if len(seg_count) != 6 * s or any(c != 1 for c in seg_count.values()):
        raise GraphThermError("boundary segments must be distinct across hexagons")
    adj = cx.hexagon_adjacency()
    seen = {0}
    frontier = [0]
    while frontier:
        h = frontier.pop()
        for h2 in adj[h]:
            if h2 not in seen:
                seen.add(h2)
                frontier.append(h2)
    if len(seen) != cx.num_hexagons:
        raise GraphThermError("dual graph is not connected")
    walks = cx.boundary_walks()
    if len(walks) != boundary_count:
        raise GraphThermError(
            f"boundary walk gives {len(walks)} components, signature says {boundary_count}"
        )
    if cx.marked is not None:
        if len(cx.marked) != s:
            raise GraphThermError(f"marking needs {s} hexagons, got {len(cx.marked)}")
        for h in cx.marked:
            if adj[h] & cx.marked:
                raise GraphThermError("marked hexagons must be pairwise non-adjacent")
        for sid, places in occ.items():
            marked_sides = sum(1 for (h, _) in places if h in cx.marked)
            if marked_sides != 1:
                raise GraphThermError(
                    f"arc {sid} must border exactly one marked hexagon"
                )
    return cx


def complex_from_fat_graph(fat: FatGraph, genus, boundary_count, mark=True):
    """Hexagon complex dual to a trivalent fat graph.

    The hexagon at a vertex lists its three incident arcs in the vertex's
    cyclic order, with one boundary segment in each corner; the ribbon
    face walks supply the boundary identifications.  Segment ids are
    assigned 1..3s to the marked hexagons' corners (ascending hexagon,
    then corner) and 3s+1..6s to the complementary ones.
    """
    vertices = sorted(fat.cyclic)
    arc_id = {name: i + 1 for i, name in enumerate(sorted(fat.edges))}
    s = len(arc_id) // 3
    proto = []
    for v in vertices:
        e1, e2, e3 = fat.cyclic[v]
        # corner (v, k) sits between cyclic edges k-1 and k
        proto.append(
            (
                ("b", (v, 0)),
                ("a", arc_id[e1]),
                ("b", (v, 1)),
                ("a", arc_id[e2]),
                ("b", (v, 2)),
                ("a", arc_id[e3]),
            )
        )
    marked = None
    if mark:
        adj = {i: set() for i in range(len(vertices))}
        vidx = {v: i for i, v in enumerate(vertices)}
        for name, (u, w) in fat.edges.items():
            adj[vidx[u]].add(vidx[w])
            adj[vidx[w]].add(vidx[u])
        marked = _independent_half(adj, s)
        if marked is None:
            raise GraphThermError(
                "fat graph has no independent half; cannot mark the complex"
            )
    seg_id = {}
    counter = 1
    order = list(sorted(marked)) + [h for h in range(len(vertices)) if h not in (marked or ())]
    if marked is None:
        order = list(range(len(vertices)))
    for h in order:
        for pos in (0, 2, 4):
            seg_id[proto[h][pos][1]] = counter
            counter += 1
    hexagons = [
        tuple(
            ("b", seg_id[sid]) if kind == "b" else ("a", sid) for kind, sid in hx
        )
        for hx in proto
    ]
    return make_complex(genus, boundary_count, hexagons, marked=marked)


def _independent_half(adj, size):
    """Lexicographically first independent set of the given size, exact search."""
    n = len(adj)
    chosen = []

    def search(start):
        if len(chosen) == size:
            return True
        if n - start < size - len(chosen):
            return False
        for v in range(start, n):
            if all(v not in adj[c] for c in chosen):
                chosen.append(v)
                if search(v + 1):
                    return True
                chosen.pop()
        return False

    if search(0):
        return frozenset(chosen)
    return None


def find_independent_half(cx: TriangulationComplex):
    """s pairwise non-adjacent hexagons, or None when no independent half exists.

    Exact search up to 24 hexagons; beyond that a greedy heuristic runs and a
    warning flags the result as heuristic.
    """
    adj = cx.hexagon_adjacency()
    if cx.num_hexagons <= 24:
        return _independent_half(adj, cx.s)
    warnings.warn("complex too large for exact search; greedy heuristic marking")
    left = set(adj)
    chosen = []
    while left and len(chosen) < cx.s:
        v = min(left, key=lambda x: (len(adj[x] & left), x))
        chosen.append(v)
        left -= {v} | adj[v]
    return frozenset(chosen) if len(chosen) == cx.s else None


def cut_system(cx: TriangulationComplex):
    """Arcs complementary to the minimal spanning tree of the dual graph.

    Cutting the surface (and the dual graph) along these s+1 arcs leaves a
    topological disk (a tree); the coding symbols are the two sides of each
    cut arc.
    """
    occ = cx.arc_occurrences()
    parent = list(range(cx.num_hexagons))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for sid in sorted(occ):
        (h1, _), (h2, _) = occ[sid]
        r1, r2 = find(h1), find(h2)
        if r1 != r2:
            parent[r1] = r2
            tree.append(sid)
    return tuple(sid for sid in sorted(occ) if sid not in set(tree))


def dual_graph(cx: TriangulationComplex, arc_lengths=None) -> MetricGraph:
    """Dual fat graph as a MetricGraph; edge names are the arc ids as strings."""
    occ = cx.arc_occurrences()
    edges = []
    lengths = {}
    for sid in sorted(occ):
        (h1, _), (h2, _) = occ[sid]
        name = str(sid)
        edges.append((h1, h2, name))
        lengths[name] = 1.0 if arc_lengths is None else float(arc_lengths[sid])
    return MetricGraph(num_vertices=cx.num_hexagons, edges=tuple(edges), lengths=lengths)


# ---------------------------------------------------------------------------
# Hyperbolic structures from coordinates
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SurfaceStructure:
    """Solved hyperbolic structure of a marked complex at given coordinates.

    ``ortholengths`` maps arc id -> length, ``segment_lengths`` covers all 6s
    boundary segments (coordinates plus the solved complementary sides),
    ``generators`` maps each cut arc to its holonomy matrix together with
    the crossing direction it represents, and ``boundary`` lists the cuff
    walks with their lengths.
    """

    complex: TriangulationComplex = field(repr=False)
    coords: dict
    ortholengths: dict
    segment_lengths: dict
    hexagon_sides: tuple
    frames: tuple = field(repr=False)
    placements: tuple = field(repr=False)
    cut_arcs: tuple
    generators: dict = field(repr=False)
    generator_direction: dict
    relation_residual: float
    closure_residual: float

    def boundary_walks(self):
        return self.complex.boundary_walks()

    def boundary_lengths(self):
        return tuple(
            sum(self.segment_lengths[self.complex.hexagons[h][pos][1]] for (h, pos, _, _) in walk)
            for walk in self.boundary_walks()
        )

    def boundary_words(self, walk_index: int):
        """Cut-arc crossing word of a boundary component (tree arcs drop out)."""
        walk = self.boundary_walks()[walk_index]
        word = []
        cuts = set(self.cut_arcs)
        for (h, _pos, arc_id, nxt_hex) in walk:
            if arc_id not in cuts:
                continue
            frm, _to = self.generator_direction[arc_id]
            word.append(("+" if h == frm else "-") + str(arc_id))
        return tuple(word)

    def holonomy_of_word(self, word):
        """Product of cut-arc generators over a crossing word such as +3 -5."""
        if len(word) == 0:
            raise GraphThermError("empty word has no holonomy")
        out = np.eye(2)
        for token in word:
            token = str(token)
            sign = "+"
            if token[0] in "+-":
                sign, token = token[0], token[1:]
            try:
                arc = int(token)
            except ValueError:
                raise GraphThermError(f"word token {token!r} is not an arc id") from None
            if arc not in self.generators:
                raise GraphThermError(
                    f"arc {arc} is not a cut arc; generators exist only for {self.cut_arcs}"
                )
            g = self.generators[arc]
            out = out @ (g if sign == "+" else _inv(g))
        return out


def _layout_frames(side_lengths):
    """Frames of a hexagon developed from its first arc on the imaginary axis.

    ``side_lengths`` is the stored cyclic order (b, a, b, a, b, a); the walk
    starts at the side of index 1 (the first arc).  Returns frames indexed by
    stored position, plus the relative closure residual.
    """
    order = [1, 2, 3, 4, 5, 0]
    frames = {}
    u = np.eye(2)
    log_norm = 0.0
    for pos in order:
        frames[pos] = u
        u = u @ _translation(side_lengths[pos]) @ _TURN
        log_norm += 0.5 * side_lengths[pos]
    closure = min(np.abs(u - np.eye(2)).max(), np.abs(u + np.eye(2)).max())
    # closure cancels catastrophically for huge hexagons; scale the residual
    scale = max(1.0, math.exp(min(log_norm, 700.0)) * 1e-16)
    return frames, closure / scale


def surface_from_coordinates(cx: TriangulationComplex, coords) -> SurfaceStructure:
    """Solve all hexagons and assemble holonomy from the coordinates.

    ``coords`` maps each marked boundary segment id to its length.  Marked
    hexagons are solved first (giving every ortholength), complementary
    hexagons afterwards in breadth-first order from the marked ones, and the
    hexagons are developed in the upper half-plane over the dual spanning
    tree; each non-tree arc yields one holonomy generator.
    """
    if cx.marked is None:
        raise GraphThermError("complex has no marking; find_independent_half first")
    marked_ids = cx.marked_segment_ids()
    missing = [sid for sid in marked_ids if sid not in coords]
    if missing:
        raise GraphThermError(f"coordinate for segment {missing[0]} missing")
    for sid in marked_ids:
        if not (float(coords[sid]) > 0):
            raise HexagonError(f"coordinate b_{sid} must be positive")

    ortho = {}
    segment_lengths = {int(s): float(coords[s]) for s in marked_ids}
    for h in sorted(cx.marked):
        hx = cx.hexagons[h]
        b0, b2, b4 = (segment_lengths[hx[p][1]] for p in (0, 2, 4))
        opp0, opp2, opp4 = solve_hexagon(b0, b2, b4)
        # side opposite position p sits at position p+3
        for arc_pos, val in ((3, opp0), (5, opp2), (1, opp4)):
            ortho[hx[arc_pos][1]] = val
    comp = [h for h in range(cx.num_hexagons) if h not in cx.marked]
    for h in comp:
        hx = cx.hexagons[h]
        a1, a3, a5 = (ortho[hx[p][1]] for p in (1, 3, 5))
        opp1, opp3, opp5 = solve_hexagon(a1, a3, a5)
        for seg_pos, val in ((4, opp1), (0, opp3), (2, opp5)):
            segment_lengths[hx[seg_pos][1]] = val

    def sides_of(h):
        hx = cx.hexagons[h]
        return [
            segment_lengths[sid] if kind == "b" else ortho[sid] for kind, sid in hx
        ]

    hexagon_sides = tuple(tuple(sides_of(h)) for h in range(cx.num_hexagons))
    relation_residual = max(hexagon_relation_residual(s) for s in hexagon_sides)
    if relation_residual > 1e-10:
        raise HexagonError(
            f"hexagon relation residual {relation_residual:.2e} exceeds 1e-10"
        )

    frames = []
    closure = 0.0
    for h in range(cx.num_hexagons):
        fr, cl = _layout_frames(hexagon_sides[h])
        frames.append(fr)
        closure = max(closure, cl)
    if closure > 1e-8:
        raise HexagonError(f"hexagon failed to close up (residual {closure:.2e})")

    # develop over the dual spanning tree, rooted at the first marked hexagon
    occ = cx.arc_occurrences()
    cuts = cut_system(cx)
    cut_set = set(cuts)
    tree_nbrs = {h: [] for h in range(cx.num_hexagons)}
    for sid in sorted(occ):
        if sid in cut_set:
            continue
        (h1, p1), (h2, p2) = occ[sid]
        tree_nbrs[h1].append((h2, sid, p1, p2))
        tree_nbrs[h2].append((h1, sid, p2, p1))
    root = min(cx.marked)
    placements = {root: np.eye(2)}
    queue = [root]
    while queue:
        h = queue.pop(0)
        for h2, sid, p_here, p_there in sorted(tree_nbrs[h], key=lambda t: t[1]):
            if h2 in placements:
                continue
            glue = _half_turn_about_midpoint(ortho[sid])
            placements[h2] = (
                placements[h] @ frames[h][p_here] @ glue @ _inv(frames[h2][p_there])
            )
            queue.append(h2)

    generators = {}
    direction = {}
    for sid in cuts:
        (h1, p1), (h2, p2) = occ[sid]
        glue = _half_turn_about_midpoint(ortho[sid])
        target = placements[h1] @ frames[h1][p1] @ glue @ _inv(frames[h2][p2])
        generators[sid] = target @ _inv(placements[h2])
        direction[sid] = (h1, h2)

    return SurfaceStructure(
        complex=cx,
        coords={int(s): float(coords[s]) for s in marked_ids},
        ortholengths=ortho,
        segment_lengths=segment_lengths,
        hexagon_sides=hexagon_sides,
        frames=tuple(frames),
        placements=tuple(placements[h] for h in range(cx.num_hexagons)),
        cut_arcs=cuts,
        generators=generators,
        generator_direction=direction,
        relation_residual=relation_residual,
        closure_residual=closure,
    )


def geodesic_length_of_word(ss: SurfaceStructure, word) -> float:
    """Geodesic length of the free homotopy class of a cut-arc crossing word."""
    return translation_length(ss.holonomy_of_word(word))


def arc_midpoint_distance(ss: SurfaceStructure, hexagon: int, arc1: int, arc2: int) -> float:
    """Distance between the midpoints of two arc sides of one hexagon."""
    hx = ss.complex.hexagons[hexagon]
    pos = {sid: p for p, (kind, sid) in enumerate(hx) if kind == "a"}
    for arc in (arc1, arc2):
        if arc not in pos:
            raise GraphThermError(f"arc {arc} is not a side of hexagon {hexagon}")
    frames = ss.frames[hexagon]
    m1 = frames[pos[arc1]] @ _translation(0.5 * ss.ortholengths[arc1])
    m2 = frames[pos[arc2]] @ _translation(0.5 * ss.ortholengths[arc2])
    w = _apply(_inv(m1) @ m2, 1j)
    return _dist(1j, w)


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------


def complex_to_dict(cx: TriangulationComplex):
    return {
        "signature": [cx.genus, cx.boundary_count],
        "hexagons": [
            {
                "sides": [f"{kind}:{sid}" for kind, sid in hx],
                "marked": cx.marked is not None and h in cx.marked,
            }
            for h, hx in enumerate(cx.hexagons)
        ],
    }


def complex_from_dict(data) -> TriangulationComplex:
    if not isinstance(data, dict) or "signature" not in data or "hexagons" not in data:
        raise InputFormatError("complex file: need keys 'signature' and 'hexagons'")
    sig = data["signature"]
    if not (isinstance(sig, list) and len(sig) == 2):
        raise InputFormatError("complex file: 'signature' must be [genus, boundary_count]")
    hexagons = []
    marked = set()
    for h, entry in enumerate(data["hexagons"]):
        where = f"hexagons[{h}]"
        if not isinstance(entry, dict) or "sides" not in entry:
            raise InputFormatError(f"complex file: {where} must have 'sides'")
        sides = []
        for pos, rec in enumerate(entry["sides"]):
            if not isinstance(rec, str) or ":" not in rec:
                raise InputFormatError(
                    f"complex file: {where}.sides[{pos}] must look like 'b:3'"
                )
            kind, _, sid = rec.partition(":")
            try:
                sides.append((kind, int(sid)))
            except ValueError:
                raise InputFormatError(
                    f"complex file: {where}.sides[{pos}]: id {sid!r} not an integer"
                ) from None
        hexagons.append(sides)
        if entry.get("marked"):
            marked.add(h)
    try:
        return make_complex(
            sig[0], sig[1], hexagons, marked=marked if marked else None
        )
    except GraphThermError as exc:
        raise InputFormatError(f"complex file: {exc}") from exc


def load_complex(path) -> TriangulationComplex:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read complex file {path}: {exc}") from exc
    return complex_from_dict(data)
