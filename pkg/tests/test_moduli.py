"""Pressure metric on the moduli space of entropy-1 metrics.

The independent oracle for the norm is the finite-difference Hessian of the
pressure function along the entropy-preserving curve l_s = normalize(l + s v)
(velocity by central difference, Hessian by Richardson-extrapolated second
difference).  Coding invariance is checked against the midpoint cut-arc
coding.
"""

import math

import numpy as np
import pytest

from graphtherm.coding import graph_cut_system, midpoint_coding
from graphtherm.errors import GraphThermError, NonTangentError
from graphtherm.moduli import (
    ModuliPoint,
    edge_weights,
    intersection_J,
    metric_tensor,
    metric_via_midpoint_coding,
    moduli_point,
    normalize_to_entropy_one,
    pressure_norm,
    tangent_basis,
    tangent_vector,
    thermodynamic_map,
)
from graphtherm.thermo import (
    Potential,
    edge_length_potential,
    equilibrium_state,
    integrate,
    linear_combination,
    pressure,
)

LOG2 = math.log(2.0)


def curve_oracle(p: ModuliPoint, v, delta=1e-4, eps=1e-3):
    """FD Hessian of the pressure along the entropy-preserving curve."""
    lp = normalize_to_entropy_one(
        p.graph, {e: p.lengths[e] + delta * v.rates[e] for e in p.lengths}
    ).lengths
    lm = normalize_to_entropy_one(
        p.graph, {e: p.lengths[e] - delta * v.rates[e] for e in p.lengths}
    ).lengths
    g = {}
    for e in p.lengths:
        rate = -(lp[e] - lm[e]) / (2 * delta)
        g[("+" + e,)] = rate
        g[("-" + e,)] = rate
    gpot = Potential(1, g)
    f = edge_length_potential(p.graph).scaled(-1.0)

    def press(t):
        return pressure(p.ts, linear_combination(p.ts, [(1.0, f), (t, gpot)]))

    d_full = (press(eps) - 2 * press(0.0) + press(-eps)) / eps**2
    d_half = (press(eps / 2) - 2 * press(0.0) + press(-eps / 2)) / (eps / 2) ** 2
    hess = (4 * d_half - d_full) / 3
    st = equilibrium_state(p.ts, f)
    return hess / integrate(edge_length_potential(p.graph), st)


def random_point(graph, rng):
    lengths = {e: float(rng.uniform(0.5, 2.0)) for e in graph.edge_names}
    return normalize_to_entropy_one(graph, lengths)


def random_tangent(p, rng):
    rates = {e: float(rng.normal()) for e in p.graph.edge_names}
    return tangent_vector(p, rates, project=True)


def apply_automorphism(p: ModuliPoint, perm):
    """Relabel edges of a theta-like point by a name permutation."""
    lengths = {perm[e]: p.lengths[e] for e in p.lengths}
    return moduli_point(p.graph.with_lengths(lengths))


class TestNormalize:
    def test_theta_unit(self, theta):
        p = normalize_to_entropy_one(theta)
        for e in "abc":
            assert p.lengths[e] == pytest.approx(LOG2, abs=1e-12)

    def test_idempotent(self, theta):
        p = normalize_to_entropy_one(theta)
        q = normalize_to_entropy_one(p.graph)
        for e in "abc":
            assert q.lengths[e] == pytest.approx(p.lengths[e], abs=1e-12)

    def test_scale_invariant_target(self, theta):
        p = normalize_to_entropy_one(theta.with_lengths({"a": 2.0, "b": 2.0, "c": 2.0}))
        for e in "abc":
            assert p.lengths[e] == pytest.approx(LOG2, abs=1e-12)

    def test_moduli_point_validates(self, theta):
        with pytest.raises(GraphThermError, match="entropy"):
            moduli_point(theta)


class TestThermodynamicMap:
    def test_theta_symmetric(self, theta):
        p = normalize_to_entropy_one(theta)
        f = thermodynamic_map(p)
        assert f.depth == 1
        assert all(v == pytest.approx(-LOG2, abs=1e-12) for v in f.values.values())
        assert pressure(p.ts, f) == pytest.approx(0.0, abs=1e-10)

    def test_pressure_zero_everywhere(self, theta):
        rng = np.random.default_rng(4)
        for _ in range(5):
            p = random_point(theta, rng)
            assert pressure(p.ts, thermodynamic_map(p)) == pytest.approx(0.0, abs=1e-10)

    def test_commutes_with_automorphism(self, theta):
        p = normalize_to_entropy_one(theta.with_lengths({"a": 1.0, "b": 1.3, "c": 0.8}))
        perm = {"a": "b", "b": "a", "c": "c"}
        q = apply_automorphism(p, perm)
        f_q = thermodynamic_map(q)
        f_p = thermodynamic_map(p)
        for (s,), val in f_p.values.items():
            assert f_q.values[(s[0] + perm[s[1:]],)] == pytest.approx(val, abs=1e-15)


class TestTangentBasis:
    def test_theta_dimension_and_constraint(self, theta):
        p = normalize_to_entropy_one(theta)
        basis = tangent_basis(p)
        assert len(basis) == 2
        w = edge_weights(p)
        for v in basis:
            assert abs(sum(w[e] * v.rates[e] for e in v.rates)) <= 1e-12

    def test_symmetric_point_difference_vector(self, theta):
        p = normalize_to_entropy_one(theta)
        v = tangent_vector(p, {"a": 1.0, "b": -1.0, "c": 0.0})
        assert v.residual <= 1e-12

    @pytest.mark.parametrize("name", ["theta", "two_loop", "dumbbell", "k4"])
    def test_dimension_on_all_graphs(self, name, request):
        rng = np.random.default_rng(9)
        p = random_point(request.getfixturevalue(name), rng)
        assert len(tangent_basis(p)) == len(p.graph.edge_names) - 1

    def test_non_tangent_rejected(self, theta):
        p = normalize_to_entropy_one(theta)
        with pytest.raises(NonTangentError, match="residual"):
            tangent_vector(p, {"a": 1.0, "b": 1.0, "c": 1.0})


class TestPressureNorm:
    def test_zero_vector(self, theta):
        p = normalize_to_entropy_one(theta)
        v = tangent_vector(p, {"a": 0.0, "b": 0.0, "c": 0.0})
        assert pressure_norm(p, v) == pytest.approx(0.0, abs=1e-14)

    def test_quadratic_scaling(self, theta):
        rng = np.random.default_rng(13)
        p = random_point(theta, rng)
        v = random_tangent(p, rng)
        assert pressure_norm(p, v.scaled(2.0)) == pytest.approx(
            4.0 * pressure_norm(p, v), rel=1e-12
        )

    def test_curve_oracle_symmetric(self, theta):
        p = normalize_to_entropy_one(theta)
        v = tangent_vector(p, {"a": 1.0, "b": -1.0, "c": 0.0})
        assert pressure_norm(p, v) == pytest.approx(curve_oracle(p, v), rel=1e-5)

    @pytest.mark.parametrize("name", ["theta", "two_loop", "dumbbell"])
    def test_curve_oracle_basis_sweep(self, name, request):
        rng = np.random.default_rng(21)
        p = random_point(request.getfixturevalue(name), rng)
        for v in tangent_basis(p):
            assert pressure_norm(p, v) == pytest.approx(curve_oracle(p, v), rel=1e-5)

    def test_positivity_on_random_tangents(self, theta):
        rng = np.random.default_rng(37)
        p = random_point(theta, rng)
        for _ in range(100):
            v = random_tangent(p, rng)
            scale = max(abs(x) for x in v.rates.values())
            assert pressure_norm(p, v.scaled(1.0 / scale)) > 0


class TestMetricTensor:
    def test_theta_symmetric_diagonal(self, theta):
        t = metric_tensor(normalize_to_entropy_one(theta))
        assert t.matrix[0, 0] == pytest.approx(t.matrix[1, 1], abs=1e-12)
        assert np.allclose(t.matrix, t.matrix.T)

    def test_positive_definite(self, theta, two_loop):
        rng = np.random.default_rng(43)
        for graph in (theta, two_loop):
            for _ in range(5):
                t = metric_tensor(random_point(graph, rng))
                assert t.eigenvalues.min() > 0

    def test_automorphism_naturality(self, theta):
        # g_{sigma p}(sigma u, sigma v) = g_p(u, v) for the b <-> c swap
        p = normalize_to_entropy_one(theta.with_lengths({"a": 0.9, "b": 1.2, "c": 1.5}))
        perm = {"a": "a", "b": "c", "c": "b"}
        q = apply_automorphism(p, perm)
        rng = np.random.default_rng(3)
        for _ in range(5):
            u = random_tangent(p, rng)
            pu = tangent_vector(q, {perm[e]: u.rates[e] for e in u.rates})
            assert pressure_norm(q, pu) == pytest.approx(pressure_norm(p, u), abs=1e-10)

    def test_invariant_tensor_at_symmetric_point(self, theta):
        # the swap fixes the symmetric point, so conjugating the tensor by the
        # induced basis map must reproduce it
        p = normalize_to_entropy_one(theta)
        t = metric_tensor(p)
        perm = {"a": "a", "b": "c", "c": "b"}
        n = len(t.basis)
        g_perm = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                ui = tangent_vector(p, {perm[e]: t.basis[i].rates[e] for e in t.basis[i].rates})
                uj = tangent_vector(p, {perm[e]: t.basis[j].rates[e] for e in t.basis[j].rates})
                plus = pressure_norm(p, ui.plus(uj))
                minus = pressure_norm(p, ui.minus(uj))
                g_perm[i, j] = 0.25 * (plus - minus)
        assert np.allclose(g_perm, t.matrix, atol=1e-10)


class TestIntersectionJ:
    def test_self_intersection_exact(self, theta):
        p = normalize_to_entropy_one(theta)
        assert intersection_J(p, p, 8 * LOG2) == 1.0

    def test_automorphism_invariance(self, theta):
        l1 = normalize_to_entropy_one(theta.with_lengths({"a": 1.0, "b": 1.3, "c": 0.9}))
        l2 = normalize_to_entropy_one(theta.with_lengths({"a": 0.7, "b": 1.0, "c": 1.2}))
        perm = {"a": "b", "b": "a", "c": "c"}
        j1 = intersection_J(l1, l2, 9.0)
        j2 = intersection_J(apply_automorphism(l1, perm), apply_automorphism(l2, perm), 9.0)
        assert j2 == pytest.approx(j1, rel=1e-14)

    def test_convergence_three_significant_figures(self, theta):
        l1 = normalize_to_entropy_one(theta)
        l2 = normalize_to_entropy_one(theta.with_lengths({"a": 1.0, "b": 1.0, "c": 2.0}))
        t0 = 10 * LOG2
        j_a = intersection_J(l1, l2, t0)
        j_b = intersection_J(l1, l2, 1.5 * t0)
        assert j_a >= 1.0  # renormalised intersection is at least 1
        assert abs(j_a - j_b) / j_b < 5e-4

    def test_empty_range_errors(self, theta):
        p = normalize_to_entropy_one(theta)
        with pytest.raises(GraphThermError, match="no geodesics"):
            intersection_J(p, p, 0.5)


class TestMidpointCodingMetric:
    def test_cut_system_of_theta(self, theta):
        cuts = graph_cut_system(theta)
        assert cuts == ("b", "c")  # complement of the minimal spanning tree {a}
        coding = midpoint_coding(theta)
        assert coding.shift.num_symbols == 4
        assert coding.shift.aperiodic

    def test_zero_vector(self, theta):
        p = normalize_to_entropy_one(theta)
        v = tangent_vector(p, {"a": 0.0, "b": 0.0, "c": 0.0})
        assert metric_via_midpoint_coding(p, v) == pytest.approx(0.0, abs=1e-14)

    def test_symmetric_point_agreement(self, theta):
        p = normalize_to_entropy_one(theta)
        v = tangent_vector(p, {"a": 1.0, "b": -1.0, "c": 0.0})
        assert metric_via_midpoint_coding(p, v) == pytest.approx(
            pressure_norm(p, v), abs=1e-8
        )

    @pytest.mark.parametrize("name", ["theta", "two_loop", "dumbbell"])
    def test_basis_sweep_agreement(self, name, request):
        rng = np.random.default_rng(61)
        p = random_point(request.getfixturevalue(name), rng)
        for v in tangent_basis(p):
            assert metric_via_midpoint_coding(p, v) == pytest.approx(
                pressure_norm(p, v), abs=1e-8
            )

    def test_inconsistent_cut_system(self, theta):
        p = normalize_to_entropy_one(theta)
        v = tangent_vector(p, {"a": 0.0, "b": 0.0, "c": 0.0})
        with pytest.raises(GraphThermError, match="cut"):
            metric_via_midpoint_coding(p, v, cut_edges=("a", "b", "c"))
        with pytest.raises(GraphThermError):
            metric_via_midpoint_coding(p, v, cut_edges=("z",))
