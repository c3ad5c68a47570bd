"""Degeneration of hyperbolic bordered surfaces to a metric graph.

A base point b (marked-hexagon coordinates summing to 1 whose per-hexagon
triples satisfy strict triangle inequalities) spans the ray of surfaces with
coordinates lambda * b.  As lambda grows the arcs shrink like
2 exp(lambda (b1 - b2 - b3) / 2), each rescaled hexagon converges to a
tripod, and the surfaces converge (after rescaling lengths by t = 1/lambda)
to a metric on the dual graph.  This module computes the sweep, the decay
fits, the limit metric (in closed form and by midpoint distances), the
depth-n locally constant approximations of the surface length potential on
the cut-arc coding, and the speed and length of the degeneration path in
the pressure metric.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .coding import midpoint_coding, no_backtrack_shift
from .errors import GraphThermError
from .graphs import TransitionStructure
from .hexagons import (
    SurfaceStructure,
    TriangulationComplex,
    arc_midpoint_distance,
    cut_system,
    dual_graph,
    surface_from_coordinates,
    translation_length,
)
from .graphs import build_transition_structure
from .moduli import ModuliPoint, normalize_to_entropy_one
from .thermo import (
    Potential,
    edge_length_potential,
    equilibrium_state,
    integrate,
    topological_entropy,
    variance,
)

__all__ = [
    "DegenerationPath",
    "ConeReport",
    "PathSample",
    "cone_check",
    "rescaled_surface_at",
    "arc_decay_rate",
    "expected_decay_slope",
    "comp_segment_limits",
    "limit_graph_metric",
    "midpoint_graph_metric",
    "coding_shift",
    "surface_potential_approx",
    "graph_potential_approx",
    "path_potential",
    "path_speed",
    "path_length",
    "entropy_band",
]


@dataclass(frozen=True)
class ConeReport:
    """Min triangle-inequality margin per marked hexagon; inside iff all > 0."""

    margins: dict
    minimum: float

    @property
    def inside(self):
        return self.minimum > 0


def cone_check(cx: TriangulationComplex, b) -> ConeReport:
    if cx.marked is None:
        raise GraphThermError("complex has no marking")
    total = sum(float(b[s]) for s in cx.marked_segment_ids())
    if abs(total - 1.0) > 1e-12:
        raise GraphThermError(f"coordinates must sum to 1 (got {total!r})")
    margins = {}
    for h in sorted(cx.marked):
        hx = cx.hexagons[h]
        x, y, z = (float(b[hx[p][1]]) for p in (0, 2, 4))
        margins[h] = min(x + y - z, y + z - x, z + x - y)
    return ConeReport(margins=margins, minimum=min(margins.values()))


@dataclass(frozen=True, eq=False)
class DegenerationPath:
    """Ray lambda * b through the cone, parametrised by t = 1/lambda."""

    complex: TriangulationComplex = field(repr=False)
    base: dict
    cone: ConeReport

    @classmethod
    def create(cls, cx: TriangulationComplex, b) -> "DegenerationPath":
        base = {int(s): float(b[s]) for s in cx.marked_segment_ids()}
        report = cone_check(cx, base)
        if not report.inside:
            raise GraphThermError(
                f"base point outside the cone (margin {report.minimum:.4f})"
            )
        return cls(complex=cx, base=base, cone=report)


@dataclass(frozen=True, eq=False)
class PathSample:
    """The surface at one parameter value, with lengths rescaled by t."""

    path: DegenerationPath = field(repr=False)
    lam: float
    t: float
    surface: SurfaceStructure = field(repr=False)
    rescaled_ortholengths: dict
    rescaled_comp_segments: dict
    relation_residual: float


def rescaled_surface_at(path: DegenerationPath, lam: float) -> PathSample:
    """Surface at coordinates lambda * b with all lengths carried at scale 1/lambda."""
    if lam < 1:
        raise GraphThermError("lambda must be >= 1")
    cx = path.complex
    coords = {s: lam * v for s, v in path.base.items()}
    ss = surface_from_coordinates(cx, coords)
    t = 1.0 / lam
    marked_ids = set(path.base)
    comp = {
        s: t * v for s, v in ss.segment_lengths.items() if s not in marked_ids
    }
    return PathSample(
        path=path,
        lam=lam,
        t=t,
        surface=ss,
        rescaled_ortholengths={a: t * v for a, v in ss.ortholengths.items()},
        rescaled_comp_segments=comp,
        relation_residual=ss.relation_residual,
    )


def _marked_hexagon_of_arc(cx: TriangulationComplex, arc: int):
    for h, pos in cx.arc_occurrences()[arc]:
        if h in cx.marked:
            return h, pos
    raise GraphThermError(f"arc {arc} borders no marked hexagon")


def expected_decay_slope(path: DegenerationPath, arc: int) -> float:
    """(b_opp - b_adj1 - b_adj2)/2 from the arc's marked hexagon triple."""
    cx = path.complex
    h, pos = _marked_hexagon_of_arc(cx, arc)
    hx = cx.hexagons[h]
    opp = path.base[hx[(pos + 3) % 6][1]]
    adj1 = path.base[hx[(pos + 1) % 6][1]]
    adj2 = path.base[hx[(pos - 1) % 6][1]]
    return 0.5 * (opp - adj1 - adj2)


@dataclass(frozen=True)
class DecayFit:
    arc: int
    slope: float
    intercept: float
    expected_slope: float

    @property
    def intercept_constant(self):
        """exp of the fitted intercept; the leading constant of the arc decay."""
        return math.exp(self.intercept)


def arc_decay_rate(path: DegenerationPath, arc: int, lam_grid) -> DecayFit:
    """Least-squares slope of log l(arc) against lambda over the grid."""
    lam_grid = sorted(float(x) for x in lam_grid)
    if len(lam_grid) < 3:
        raise GraphThermError("need at least 3 lambda values for a decay fit")
    logs = []
    for lam in lam_grid:
        ss = rescaled_surface_at(path, lam)
        logs.append(math.log(ss.surface.ortholengths[arc]))
    x = np.array(lam_grid)
    y = np.array(logs)
    slope, intercept = np.polyfit(x, y, 1)
    return DecayFit(
        arc=arc,
        slope=float(slope),
        intercept=float(intercept),
        expected_slope=expected_decay_slope(path, arc),
    )


def comp_segment_limits(path: DegenerationPath):
    """Limits of b^c / lambda for every complementary boundary segment.

    The segment adjacent to arcs q1, q2 converges to half the sum, over both
    arcs, of (other two sides - opposite side) read in the arc's marked
    hexagon.
    """
    cx = path.complex

    def marked_term(arc):
        h, pos = _marked_hexagon_of_arc(cx, arc)
        hx = cx.hexagons[h]
        opp = path.base[hx[(pos + 3) % 6][1]]
        adj1 = path.base[hx[(pos + 1) % 6][1]]
        adj2 = path.base[hx[(pos - 1) % 6][1]]
        return adj1 + adj2 - opp

    limits = {}
    marked_ids = set(path.base)
    for h in range(cx.num_hexagons):
        if h in cx.marked:
            continue
        hx = cx.hexagons[h]
        for pos in (0, 2, 4):
            sid = hx[pos][1]
            if sid in marked_ids:
                continue
            q1 = hx[(pos + 1) % 6][1]
            q2 = hx[(pos - 1) % 6][1]
            limits[sid] = 0.5 * (marked_term(q1) + marked_term(q2))
    return limits


@dataclass(frozen=True, eq=False)
class LimitMetric:
    """Limit metric on the dual graph, before and after entropy normalisation."""

    pre_normalization: dict
    point: ModuliPoint
    entropy: float


def limit_graph_metric(path: DegenerationPath) -> LimitMetric:
    """Closed-form limit of the rescaled surfaces on the dual graph.

    Each hexagon contributes a tripod branch toward each of its arcs,
    (adjacent + adjacent - opposite)/2 of its (limiting) boundary sides; an
    edge of the dual graph is the marked branch plus the complementary
    branch across its arc.
    """
    cx = path.complex
    comp_limits = comp_segment_limits(path)

    def branch(h, pos):
        hx = cx.hexagons[h]
        vals = {}
        for p in (0, 2, 4):
            sid = hx[p][1]
            vals[p] = path.base[sid] if sid in path.base else comp_limits[sid]
        opp = vals[(pos + 3) % 6]
        adj1 = vals[(pos + 1) % 6]
        adj2 = vals[(pos - 1) % 6]
        return 0.5 * (adj1 + adj2 - opp)

    lengths = {}
    for arc, occ in cx.arc_occurrences().items():
        lengths[str(arc)] = sum(branch(h, pos) for h, pos in occ)
    graph = dual_graph(cx, {int(n): v for n, v in lengths.items()})
    h_pre = topological_entropy(
        build_transition_structure(graph), edge_length_potential(graph)
    )
    point = normalize_to_entropy_one(graph)
    return LimitMetric(pre_normalization=lengths, point=point, entropy=h_pre)


def midpoint_graph_metric(sample: PathSample):
    """Numerical limit metric from rescaled midpoint-to-midpoint distances.

    Within each hexagon the three pairwise distances between arc midpoints
    recover tripod branches; edges are sums of the two branches across each
    arc.  Cross-checks :func:`limit_graph_metric` at large lambda.
    """
    cx = sample.path.complex
    ss = sample.surface
    branch = {}
    for h in range(cx.num_hexagons):
        arcs = [sid for kind, sid in cx.hexagons[h] if kind == "a"]
        d12 = arc_midpoint_distance(ss, h, arcs[0], arcs[1])
        d13 = arc_midpoint_distance(ss, h, arcs[0], arcs[2])
        d23 = arc_midpoint_distance(ss, h, arcs[1], arcs[2])
        branch[(h, arcs[0])] = 0.5 * (d12 + d13 - d23) * sample.t
        branch[(h, arcs[1])] = 0.5 * (d12 + d23 - d13) * sample.t
        branch[(h, arcs[2])] = 0.5 * (d13 + d23 - d12) * sample.t
    lengths = {}
    for arc, occ in cx.arc_occurrences().items():
        lengths[str(arc)] = sum(branch[(h, arc)] for h, _pos in occ)
    return lengths


# ---------------------------------------------------------------------------
# Locally constant approximations of the surface potential
# ---------------------------------------------------------------------------


def coding_shift(cx: TriangulationComplex) -> TransitionStructure:
    """No-backtracking shift on the two sides of each cut arc."""
    return no_backtrack_shift([str(a) for a in cut_system(cx)])


def surface_potential_approx(sample: PathSample, depth: int) -> Potential:
    """Depth-n locally constant approximation of the surface length function.

    Each admissible n-word of cut-arc crossings is sent to the rescaled
    geodesic length (via the holonomy trace) of the closed curve tracing the
    word cyclically, divided by n; Birkhoff sums over period-n orbits then
    reproduce exact geodesic lengths.
    """
    if depth < 1:
        raise GraphThermError("depth must be >= 1")
    shift = coding_shift(sample.path.complex)
    ss = sample.surface
    values = {}
    for word in shift.admissible_words(depth):
        hol = ss.holonomy_of_word(word)
        values[word] = sample.t * translation_length(hol) / depth
    return Potential(depth, values)


def graph_potential_approx(cx: TriangulationComplex, edge_lengths, depth: int) -> Potential:
    """The same approximation scheme evaluated on a metric on the dual graph."""
    graph = dual_graph(cx, {int(n): float(v) for n, v in edge_lengths.items()})
    cuts = [str(a) for a in cut_system(cx)]
    coding = midpoint_coding(graph, cuts)
    shift = coding_shift(cx)
    values = {}
    for word in shift.admissible_words(depth):
        values[word] = coding.closed_word_length(word) / depth
    return Potential(depth, values)


def path_potential(path: DegenerationPath, t: float, depth: int):
    """(F_t, h_t) at parameter t: the approximation and its entropy."""
    if not (0 < t <= 1):
        raise GraphThermError("t must lie in (0, 1]")
    sample = rescaled_surface_at(path, 1.0 / t)
    shift = coding_shift(path.complex)
    f_t = surface_potential_approx(sample, depth)
    h_t = topological_entropy(shift, f_t)
    return f_t, h_t


@dataclass(frozen=True)
class SpeedSample:
    t: float
    speed: float
    entropy: float
    mean_residual: float


def path_speed(path: DegenerationPath, t: float, depth: int) -> SpeedSample:
    """Pressure-metric speed of r(t) = -h_t F_t by central difference in t.

    The derivative direction G is integrated against the equilibrium state
    of r(t); its mean vanishes analytically (r is a pressure-0 path), the
    numerical residue is subtracted and reported.
    """
    step = min(t / 10.0, 1e-3)
    shift = coding_shift(path.complex)
    f_t, h_t = path_potential(path, t, depth)
    f_p, h_p = path_potential(path, t + step, depth)
    f_m, h_m = path_potential(path, t - step, depth)
    r_t = f_t.scaled(-h_t)
    words = list(r_t.values)
    g_vals = {
        w: (-h_p * f_p.values[w] + h_m * f_m.values[w]) / (2.0 * step) for w in words
    }
    g = Potential(r_t.depth, g_vals)
    state = equilibrium_state(shift, r_t)
    mean = integrate(g, state)
    var = variance(g, state, subtract_mean=True)
    denom = integrate(f_t.scaled(h_t), state)
    return SpeedSample(
        t=t, speed=math.sqrt(var / denom), entropy=h_t, mean_residual=abs(mean)
    )


@dataclass(frozen=True)
class PathLengthReport:
    total: float
    grid: tuple
    speeds: tuple
    tail_increments: tuple
    tail_ratios: tuple


def _trapezoid(path, a, b, depth, refine):
    ts = np.linspace(a, b, refine + 1)
    speeds = [path_speed(path, float(t), depth).speed for t in ts]
    total = float(np.trapezoid(speeds, ts))
    return total, list(ts), speeds


def path_length(
    path: DegenerationPath,
    t_min: float,
    t_max: float,
    depth: int,
    grid_ratio: float = 0.5,
    refine: int = 4,
    tail_halvings: int = 2,
) -> PathLengthReport:
    """Trapezoid length of the path over a geometric grid, with a tail report.

    The grid runs from t_max down to t_min by the given ratio, each span
    subdivided linearly; tail increments are the lengths of successive
    halvings below t_min, whose geometric decay is the incompleteness
    diagnostic.
    """
    if not (0 < t_min <= t_max <= 1):
        raise GraphThermError("need 0 < t_min <= t_max <= 1")
    spans = []
    hi = t_max
    while hi > t_min * (1 + 1e-12):
        lo = max(t_min, hi * grid_ratio)
        spans.append((lo, hi))
        hi = lo
    total = 0.0
    grid = []
    speeds = []
    for lo, hi in spans:
        part, ts, sp = _trapezoid(path, lo, hi, depth, refine)
        total += part
        grid.extend(ts)
        speeds.extend(sp)
    increments = []
    hi = t_min
    for _ in range(tail_halvings):
        lo = hi * 0.5
        part, _, _ = _trapezoid(path, lo, hi, depth, refine)
        increments.append(part)
        hi = lo
    ratios = tuple(b / a for a, b in zip(increments, increments[1:]))
    order = np.argsort(grid)
    return PathLengthReport(
        total=total,
        grid=tuple(float(grid[i]) for i in order),
        speeds=tuple(float(speeds[i]) for i in order),
        tail_increments=tuple(increments),
        tail_ratios=ratios,
    )


def entropy_band(h0: float, t: float, c: float, c_prime: float):
    """Two-sided entropy bound h0 (1 +/- 4t e^(-c/2t) / c')^(-+1).

    The upper bound degenerates to +inf when the perturbation term reaches 1.
    """
    eps = 4.0 * t * math.exp(-c / (2.0 * t)) / c_prime
    lower = h0 / (1.0 + eps)
    upper = math.inf if eps >= 1.0 else h0 / (1.0 - eps)
    return lower, upper, eps
