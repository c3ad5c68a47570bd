"""Graph layer: transition structures and exact geodesic enumeration.

The independent oracle for all counting claims is trace(A^p) computed with
integer matrix powers (conftest.trace_power); enumeration results are checked
against it and against hand enumerations of the small bundled graphs.
"""

import numpy as np
import pytest

from graphtherm.errors import (
    GraphThermError,
    InputFormatError,
    InvalidGraphError,
    ResourceLimitError,
)
from graphtherm.graphs import (
    MetricGraph,
    build_transition_structure,
    count_periodic_sequences,
    enumerate_closed_geodesics,
    geodesic_length,
    graph_from_dict,
    graph_to_dict,
    reversed_geodesic,
)

from conftest import trace_power


class TestMetricGraph:
    def test_theta_valences(self, theta):
        assert theta.valence(0) == 3
        assert theta.valence(1) == 3
        assert theta.volume() == pytest.approx(3.0)

    def test_loops_count_twice(self, two_loop):
        assert two_loop.valence(0) == 4

    def test_valence_below_three_rejected(self):
        with pytest.raises(InvalidGraphError, match="valence below 3"):
            MetricGraph(
                num_vertices=2,
                edges=((0, 1, "a"), (0, 1, "b")),
                lengths={"a": 1.0, "b": 1.0},
            )

    def test_nonpositive_length_rejected(self):
        with pytest.raises(InvalidGraphError, match="positive"):
            MetricGraph(
                num_vertices=2,
                edges=((0, 1, "a"), (0, 1, "b"), (0, 1, "c")),
                lengths={"a": 1.0, "b": -1.0, "c": 1.0},
            )

    def test_disconnected_rejected(self):
        with pytest.raises(InvalidGraphError, match="connected"):
            MetricGraph(
                num_vertices=2,
                edges=((0, 0, "a"), (0, 0, "b"), (1, 1, "c"), (1, 1, "d")),
                lengths={"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0},
            )

    def test_loader_reports_path_context(self):
        with pytest.raises(InputFormatError, match=r"edges\[1\]"):
            graph_from_dict({"vertices": 2, "edges": [[0, 1, "a", 1.0], [0, 1, "b"]]})

    def test_round_trip(self, theta):
        assert graph_from_dict(graph_to_dict(theta)).lengths == theta.lengths


class TestTransitionStructure:
    def test_theta_structure(self, theta_ts):
        # 6 directed edges, 2 continuations each, no self-follows
        assert theta_ts.symbols == ("+a", "-a", "+b", "-b", "+c", "-c")
        assert theta_ts.adjacency.sum(axis=1).tolist() == [2] * 6
        assert np.trace(theta_ts.adjacency) == 0
        for i in range(6):
            assert theta_ts.adjacency[i, theta_ts.reversal[i]] == 0

    def test_theta_is_periodic_but_irreducible(self, theta_ts):
        # bipartite graph: directed-edge shift has period 2
        assert theta_ts.irreducible
        assert theta_ts.period == 2

    def test_two_loop_structure(self, two_loop):
        ts = build_transition_structure(two_loop)
        assert len(ts.symbols) == 4
        # everything follows everything except the reversal
        for i in range(4):
            for j in range(4):
                expected = 0 if j == ts.reversal[i] else 1
                assert ts.adjacency[i, j] == expected
        assert ts.adjacency.sum(axis=1).tolist() == [3] * 4
        assert ts.aperiodic

    def test_dumbbell_aperiodic(self, dumbbell):
        ts = build_transition_structure(dumbbell)
        assert ts.irreducible and ts.period == 1


class TestEnumeration:
    def test_theta_period_two(self, theta_ts):
        geos = enumerate_closed_geodesics(theta_ts, 2)
        assert all(g.period == 2 for g in geos)  # no period-1 words
        assert len(geos) == 6
        assert trace_power(theta_ts, 2) == 12
        assert all(g.primitive for g in geos)

    def test_two_loop_period_one(self, two_loop):
        # each loop traversed consistently in either direction: the words are
        # exactly the directed edges e with A(e, e) = 1
        ts = build_transition_structure(two_loop)
        geos = enumerate_closed_geodesics(ts, 1)
        diag = [int(ts.adjacency[i, i]) for i in range(4)]
        assert len(geos) == sum(diag) == trace_power(ts, 1) == 4
        assert {g.word for g in geos} == {("+a",), ("-a",), ("+b",), ("-b",)}

    def test_max_period_zero_empty(self, theta_ts):
        assert enumerate_closed_geodesics(theta_ts, 0) == ()

    @pytest.mark.parametrize("name", ["theta", "two_loop", "dumbbell", "k4"])
    def test_fixed_point_counts_match_trace(self, name, request):
        # sum of distinct rotations over period-p words == trace(A^p), p <= 8
        graph = request.getfixturevalue(name)
        ts = build_transition_structure(graph)
        assert ts.num_symbols <= 12
        for p in range(1, 9):
            assert count_periodic_sequences(ts, p) == trace_power(ts, p)

    def test_powers_tagged(self, theta_ts):
        geos = enumerate_closed_geodesics(theta_ts, 4)
        powers = [g for g in geos if not g.primitive]
        assert len(powers) == 6  # squares of the six period-2 words
        for g in powers:
            assert g.period == 4 and g.primitive_period == 2

    def test_canonical_rotation_and_order(self, theta_ts):
        geos = enumerate_closed_geodesics(theta_ts, 4)
        seen = set()
        prev_key = None
        for g in geos:
            idx = theta_ts.word_indices(g.word)
            rotations = [idx[r:] + idx[:r] for r in range(len(idx))]
            assert min(rotations) == idx
            assert idx not in seen
            seen.add(idx)
            key = (g.period, idx)
            if prev_key is not None:
                assert prev_key < key
            prev_key = key

    def test_reversal_is_length_preserving_involution(self, theta, theta_ts):
        geos = enumerate_closed_geodesics(theta_ts, 5)
        image = set()
        for g in geos:
            rg = reversed_geodesic(g, theta_ts)
            assert reversed_geodesic(rg, theta_ts) == g
            assert geodesic_length(rg, theta) == pytest.approx(geodesic_length(g, theta))
            image.add(rg.word)
        assert image == {g.word for g in geos}

    def test_deterministic(self, theta_ts):
        a = enumerate_closed_geodesics(theta_ts, 6)
        b = enumerate_closed_geodesics(theta_ts, 6)
        assert a == b

    def test_resource_guard(self, theta_ts):
        with pytest.raises(ResourceLimitError):
            enumerate_closed_geodesics(theta_ts, 14, cap=100)


class TestGeodesicLength:
    def test_unit_theta(self, theta, theta_ts):
        for g in enumerate_closed_geodesics(theta_ts, 2):
            assert geodesic_length(g, theta) == pytest.approx(2.0)

    def test_mixed_lengths(self, theta):
        graph = theta.with_lengths({"a": 1.0, "b": 1.0, "c": 2.0})
        ts = build_transition_structure(graph)
        geos = enumerate_closed_geodesics(ts, 2)
        ac = [g for g in geos if set(s[1:] for s in g.word) == {"a", "c"}]
        assert len(ac) == 2
        for g in ac:
            assert geodesic_length(g, graph) == pytest.approx(3.0)

    def test_multiplicity(self, theta):
        from graphtherm.graphs import ClosedGeodesic

        doubled = ClosedGeodesic(word=("+a", "-b", "+a", "-b"), primitive=False)
        assert geodesic_length(doubled, theta) == pytest.approx(4.0)

    def test_mismatched_graph_errors(self, k4, theta_ts):
        geos = enumerate_closed_geodesics(theta_ts, 2)
        with pytest.raises(GraphThermError):
            geodesic_length(geos[0], k4)
