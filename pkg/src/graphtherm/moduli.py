"""The moduli space of entropy-1 metrics on a graph and its pressure metric.

Points are metrics normalised so the topological entropy of the induced
length potential is 1.  Tangent vectors are per-edge perturbation rates
killing the first derivative of entropy, i.e. with zero mean against the
equilibrium state of -F_l.  The squared pressure norm of a tangent vector v
is Var(F_v, mu) / integral(F_l) dmu, the Hessian of the pressure function
rescaled as in the pressure form; the same quantity evaluated through the
midpoint cut-arc coding must agree, which is the coding-invariance check.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .coding import midpoint_coding
from .errors import GraphThermError, NonTangentError
from .graphs import (
    DEFAULT_ENUMERATION_CAP,
    MetricGraph,
    TransitionStructure,
    build_transition_structure,
    enumerate_closed_geodesics,
)
from .thermo import (
    edge_length_potential,
    equilibrium_state,
    integrate,
    rates_potential,
    topological_entropy,
    variance,
)

__all__ = [
    "ModuliPoint",
    "TangentVector",
    "MetricTensor",
    "normalize_to_entropy_one",
    "thermodynamic_map",
    "tangent_vector",
    "tangent_basis",
    "edge_weights",
    "pressure_norm",
    "metric_tensor",
    "intersection_J",
    "metric_via_midpoint_coding",
]

ENTROPY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ModuliPoint:
    """An entropy-1 metric on a graph, with its shift and equilibrium data."""

    graph: MetricGraph
    ts: TransitionStructure = field(repr=False)
    entropy_residual: float = 0.0

    @property
    def lengths(self):
        return self.graph.lengths

    def length_potential(self):
        return edge_length_potential(self.graph)

    def equilibrium(self):
        """Equilibrium state of -F_l (the image of the thermodynamic map)."""
        return equilibrium_state(self.ts, self.length_potential().scaled(-1.0))


def normalize_to_entropy_one(graph: MetricGraph, lengths=None) -> ModuliPoint:
    """Rescale a metric by its entropy, landing on the entropy-1 slice."""
    if lengths is not None:
        graph = graph.with_lengths(lengths)
    ts = build_transition_structure(graph)
    h = topological_entropy(ts, edge_length_potential(graph))
    scaled = graph.with_lengths({e: h * l for e, l in graph.lengths.items()})
    residual = abs(
        topological_entropy(ts, edge_length_potential(scaled)) - 1.0
    )
    if residual > ENTROPY_TOL:
        raise GraphThermError(f"entropy normalisation residual {residual:.2e}")
    return ModuliPoint(graph=scaled, ts=ts, entropy_residual=residual)


def moduli_point(graph: MetricGraph) -> ModuliPoint:
    """Wrap an already entropy-1 metric, validating the entropy."""
    ts = build_transition_structure(graph)
    residual = abs(topological_entropy(ts, edge_length_potential(graph)) - 1.0)
    if residual > ENTROPY_TOL:
        raise GraphThermError(
            f"metric has entropy residual {residual:.2e}; normalise it first"
        )
    return ModuliPoint(graph=graph, ts=ts, entropy_residual=residual)


def thermodynamic_map(point: ModuliPoint):
    """The pressure-0 potential -F_l of an entropy-1 metric."""
    return point.length_potential().scaled(-1.0)


def edge_weights(point: ModuliPoint):
    """Equilibrium mass of each unoriented edge, mu(+e) + mu(-e)."""
    st = point.equilibrium()
    index = {s: i for i, s in enumerate(st.states)}
    out = {}
    for name in point.graph.edge_names:
        out[name] = float(
            st.pi[index[("+" + name,)]] + st.pi[index[("-" + name,)]]
        )
    return out


@dataclass(frozen=True)
class TangentVector:
    """Per-edge perturbation rates with zero first-order entropy change."""

    point: ModuliPoint = field(repr=False)
    rates: dict
    residual: float = 0.0

    def scaled(self, a):
        return TangentVector(
            self.point, {e: a * v for e, v in self.rates.items()}, abs(a) * self.residual
        )

    def plus(self, other):
        rates = {e: self.rates[e] + other.rates[e] for e in self.rates}
        return TangentVector(self.point, rates, self.residual + other.residual)

    def minus(self, other):
        rates = {e: self.rates[e] - other.rates[e] for e in self.rates}
        return TangentVector(self.point, rates, self.residual + other.residual)


def tangent_vector(point: ModuliPoint, rates, project=False) -> TangentVector:
    """Validate (or project onto) the tangency constraint sum w_e v_e = 0."""
    w = edge_weights(point)
    rates = {e: float(rates[e]) for e in point.graph.edge_names}
    residual = sum(w[e] * rates[e] for e in rates)
    if project:
        wnorm = sum(w[e] ** 2 for e in w)
        rates = {e: rates[e] - residual * w[e] / wnorm for e in rates}
        residual = sum(w[e] * rates[e] for e in rates)
    if abs(residual) > ENTROPY_TOL:
        raise NonTangentError(
            f"tangency constraint residual {residual:.3e} exceeds {ENTROPY_TOL}"
        )
    return TangentVector(point=point, rates=rates, residual=abs(residual))


def tangent_basis(point: ModuliPoint):
    """|E| - 1 tangent vectors spanning the constraint hyperplane.

    Raw coordinate differences against the first edge, scaled so each lies
    exactly in the hyperplane: v_i = delta_{e0} - (w_{e0}/w_{ei}) delta_{ei},
    edges in sorted order.
    """
    names = point.graph.edge_names
    if len(names) < 2:
        raise GraphThermError("need at least two edges for a tangent basis")
    w = edge_weights(point)
    e0 = names[0]
    basis = []
    for name in names[1:]:
        rates = {e: 0.0 for e in names}
        rates[e0] = 1.0
        rates[name] = -w[e0] / w[name]
        basis.append(tangent_vector(point, rates))
    return tuple(basis)


def pressure_norm(point: ModuliPoint, v: TangentVector) -> float:
    """Squared pressure norm Var(F_v, mu_{-F_l}) / integral(F_l dmu)."""
    w = edge_weights(point)
    residual = sum(w[e] * v.rates[e] for e in v.rates)
    if abs(residual) > ENTROPY_TOL:
        raise NonTangentError(
            f"vector is not tangent: constraint residual {residual:.3e}"
        )
    st = point.equilibrium()
    f_v = rates_potential(point.graph, v.rates)
    var = variance(f_v, st, subtract_mean=True)
    denom = integrate(point.length_potential(), st)
    return var / denom


@dataclass(frozen=True, eq=False)
class MetricTensor:
    """Gram matrix of the pressure metric over a tangent basis."""

    basis: tuple
    matrix: np.ndarray

    @property
    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    @property
    def positive_definite(self):
        return bool(self.eigenvalues.min() > 0)


def metric_tensor(point: ModuliPoint) -> MetricTensor:
    """Assemble the Gram matrix by polarisation g(u,v) = (|u+v|^2 - |u-v|^2)/4."""
    basis = tangent_basis(point)
    n = len(basis)
    mat = np.zeros((n, n))
    for i in range(n):
        mat[i, i] = pressure_norm(point, basis[i])
        for j in range(i + 1, n):
            plus = pressure_norm(point, basis[i].plus(basis[j]))
            minus = pressure_norm(point, basis[i].minus(basis[j]))
            mat[i, j] = mat[j, i] = 0.25 * (plus - minus)
    return MetricTensor(basis=basis, matrix=mat)


def intersection_J(l1: ModuliPoint, l2: ModuliPoint, big_t: float, cap=None) -> float:
    """Finite-T renormalised intersection of two metrics on the same graph.

    (h(l2)/h(l1)) * mean over geodesics of l1-length < T of l2(gamma)/l1(gamma),
    geodesics weighted like the sequence count of entropy_by_counting.  With
    entropy-1 inputs the entropy prefactor is 1 up to the normalisation
    residuals.
    """
    if l1.graph.edge_names != l2.graph.edge_names:
        raise GraphThermError("intersection needs two metrics on the same graph")
    cap = DEFAULT_ENUMERATION_CAP if cap is None else cap
    min_len = min(l1.lengths.values())
    max_p = int(math.floor(big_t / min_len))
    total_weight = 0
    total_ratio = 0.0
    for g in enumerate_closed_geodesics(l1.ts, max_p, cap=cap):
        len1 = sum(l1.lengths[s[1:]] for s in g.word)
        if len1 >= big_t:
            continue
        len2 = sum(l2.lengths[s[1:]] for s in g.word)
        weight = g.primitive_period
        total_weight += weight
        total_ratio += weight * (len2 / len1)
    if total_weight == 0:
        raise GraphThermError(f"no geodesics below T={big_t}")
    h1 = topological_entropy(l1.ts, l1.length_potential())
    h2 = topological_entropy(l2.ts, l2.length_potential())
    return (h2 / h1) * total_ratio / total_weight


def metric_via_midpoint_coding(
    point: ModuliPoint, v: TangentVector, cut_edges=None
) -> float:
    """Squared pressure norm evaluated through the midpoint cut-arc coding.

    Recodes F_l and F_v onto the coding whose symbols are the cut-edge
    crossings (each edge split at its midpoint) and evaluates
    Var / integral there; by coding invariance of the pressure form this
    agrees with :func:`pressure_norm`.
    """
    coding = midpoint_coding(point.graph, cut_edges)
    f_l = coding.length_potential()
    f_v = coding.potential(v.rates)
    shift = coding.shift
    st = equilibrium_state(shift, f_l.scaled(-1.0))
    if abs(st.pressure) > 1e-8:
        raise GraphThermError(
            f"midpoint coding of an entropy-1 metric has pressure {st.pressure:.2e}"
        )
    mean = integrate(f_v, st)
    if abs(mean) > 1e-8:
        raise NonTangentError(
            f"vector is not tangent in the cut coding: mean {mean:.3e}"
        )
    var = variance(f_v, st, subtract_mean=True)
    denom = integrate(f_l, st)
    return var / denom
