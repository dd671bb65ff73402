"""Graph filtering, path enumeration (vs brute force), subgraph matching."""

import math
from itertools import permutations

import numpy as np
import pytest

from conftest import make_snapshot
from telefid.calio import SynthProfile, synth_snapshot
from telefid.circuits import build_encoded_teleport, build_physical_teleport, interaction_graph, lower_to_native
from telefid.errors import EdgeNotInSnapshot, NoEmbedding
from telefid.layout import (
    CouplingGraph,
    FilterThresholds,
    LayoutCandidate,
    enumerate_paths3,
    filter_graph,
    graph_from_snapshot,
    score_layout,
    subgraph_match6,
    validate_candidate,
)
from telefid.qsim import StatePrep


def brute_force_paths(g):
    """O(n^3) oracle for 3-qubit path enumeration with canonical a < c."""
    out = set()
    for a, b, c in permutations(sorted(g.nodes), 3):
        if g.has_edge(a, b) and g.has_edge(b, c) and a < c:
            out.add((a, b, c))
    return sorted(out)


def random_graph(rng, max_nodes=12):
    n = int(rng.integers(3, max_nodes + 1))
    nodes = list(range(n))
    pairs = [(a, b) for a in nodes for b in nodes if a < b]
    density = float(rng.uniform(0.15, 0.6))
    chosen = [p for p in pairs if rng.random() < density]
    return CouplingGraph.from_pairs(nodes, chosen)


class TestFilterGraph:
    def test_admit_all(self, line3_snapshot):
        g = filter_graph(line3_snapshot, FilterThresholds())
        assert g.nodes == frozenset({0, 1, 2})
        assert g.edge_pairs() == [(0, 1), (1, 2)]

    def test_exclude_all(self, line3_snapshot):
        g = filter_graph(line3_snapshot, FilterThresholds(t1_min=1e9))
        assert not g.nodes and not g.edges

    def test_bad_readout_node_removed(self):
        snap = make_snapshot(n_qubits=4, edges=((0, 1), (1, 2), (2, 3)))
        snap.qubits[1].readout_e01 = 0.2
        snap.qubits[1].readout_e10 = 0.2
        g = filter_graph(snap, FilterThresholds(ero_max=0.05))
        assert g.nodes == frozenset({0, 2, 3})
        assert g.edge_pairs() == [(2, 3)]

    def test_edge_threshold(self):
        snap = make_snapshot(n_qubits=3, edges=((0, 1), (1, 2)))
        snap.edges[0].err_2q = 0.02
        g = filter_graph(snap, FilterThresholds(e2q_max=0.01))
        assert g.edge_pairs() == [(1, 2)]

    def test_monotonicity_random_profiles(self):
        rng = np.random.default_rng(4)
        snap = synth_snapshot(SynthProfile("grid", (3, 4), "balanced", seed=9))
        for _ in range(20):
            loose = FilterThresholds(
                t1_min=float(rng.uniform(0, 100)),
                t2_min=float(rng.uniform(0, 80)),
                e1q_max=float(rng.uniform(1e-4, 1e-2)),
                e2q_max=float(rng.uniform(1e-3, 5e-2)),
                ero_max=float(rng.uniform(5e-3, 5e-2)),
            )
            tight = FilterThresholds(
                t1_min=loose.t1_min * 1.2,
                t2_min=loose.t2_min * 1.2,
                e1q_max=loose.e1q_max * 0.7,
                e2q_max=loose.e2q_max * 0.7,
                ero_max=loose.ero_max * 0.7,
            )
            g_loose = filter_graph(snap, loose)
            g_tight = filter_graph(snap, tight)
            assert g_tight.nodes <= g_loose.nodes
            assert g_tight.edges <= g_loose.edges
            assert len(enumerate_paths3(g_tight)) <= len(enumerate_paths3(g_loose))


class TestEnumeratePaths3:
    def test_line(self):
        g = CouplingGraph.from_pairs(range(4), [(0, 1), (1, 2), (2, 3)])
        cands = enumerate_paths3(g)
        assert [(c.mapping[0], c.mapping[1], c.mapping[2]) for c in cands] == [
            (0, 1, 2),
            (1, 2, 3),
        ]

    def test_triangle(self):
        g = CouplingGraph.from_pairs(range(3), [(0, 1), (1, 2), (0, 2)])
        assert len(enumerate_paths3(g)) == 3

    def test_star(self):
        g = CouplingGraph.from_pairs(range(4), [(0, 1), (0, 2), (0, 3)])
        cands = enumerate_paths3(g)
        assert len(cands) == 3
        assert all(c.mapping[1] == 0 for c in cands)

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_brute_force(self, seed):
        g = random_graph(np.random.default_rng(seed))
        got = [(c.mapping[0], c.mapping[1], c.mapping[2]) for c in enumerate_paths3(g)]
        assert got == brute_force_paths(g)
        assert len(set(got)) == len(got)


class TestScoreLayout:
    def _native(self):
        return lower_to_native(build_physical_teleport(StatePrep(math.pi / 2)))

    def test_zero_errors_zero_score(self):
        snap = make_snapshot(err_1q=0.0, err_2q=0.0, readout_e01=0.0, readout_e10=0.0)
        cand = LayoutCandidate({0: 0, 1: 1, 2: 2})
        assert score_layout(cand, self._native(), snap) == 0.0

    def test_single_cz_value(self):
        snap = make_snapshot(err_1q=0.0, err_2q=0.01, readout_e01=0.0, readout_e10=0.0)
        from telefid.circuits import Circuit, CircuitMeta, GateOp

        circ = Circuit(
            2, 0, [GateOp("CZ", (0, 1))], "physical", CircuitMeta(two_qubit_count=1)
        )
        cand = LayoutCandidate({0: 0, 1: 1})
        assert score_layout(cand, circ, snap) == pytest.approx(-math.log(0.99), abs=1e-15)

    def test_lower_error_edge_scores_lower(self):
        snap = make_snapshot(n_qubits=4, edges=((0, 1), (1, 2), (2, 3)))
        snap.edges[0].err_2q = 0.002
        snap.edges[2].err_2q = 0.02
        native = self._native()
        good = LayoutCandidate({0: 0, 1: 1, 2: 2})
        bad = LayoutCandidate({0: 1, 1: 2, 2: 3})
        assert score_layout(good, native, snap) < score_layout(bad, native, snap)

    def test_missing_edge_raises(self, line3_snapshot):
        cand = LayoutCandidate({0: 0, 1: 2, 2: 1})
        with pytest.raises(EdgeNotInSnapshot):
            score_layout(cand, self._native(), line3_snapshot)


class TestSubgraphMatch:
    def test_path_into_triangle(self):
        snap = make_snapshot(n_qubits=3, edges=((0, 1), (1, 2), (0, 2)))
        g = graph_from_snapshot(snap)
        pattern = CouplingGraph.from_pairs(range(3), [(0, 1), (1, 2)])
        cand = subgraph_match6(g, pattern, snap, seed=42)
        for a, b in pattern.edge_pairs():
            assert g.has_edge(cand.mapping[a], cand.mapping[b])

    def test_star_into_line_fails(self):
        snap = make_snapshot(n_qubits=4, edges=((0, 1), (1, 2), (2, 3)))
        g = graph_from_snapshot(snap)
        star = CouplingGraph.from_pairs(range(4), [(0, 1), (0, 2), (0, 3)])
        with pytest.raises(NoEmbedding):
            subgraph_match6(g, star, snap, seed=42)

    def test_deterministic_per_seed(self):
        # fully symmetric snapshot: every embedding ties on score
        snap = make_snapshot(n_qubits=4, edges=((0, 1), (1, 2), (2, 3), (0, 3)))
        g = graph_from_snapshot(snap)
        pattern = CouplingGraph.from_pairs(range(3), [(0, 1), (1, 2)])
        first = subgraph_match6(g, pattern, snap, seed=42)
        again = subgraph_match6(g, pattern, snap, seed=42)
        assert first.mapping == again.mapping
        other = subgraph_match6(g, pattern, snap, seed=43)
        for a, b in pattern.edge_pairs():
            assert g.has_edge(other.mapping[a], other.mapping[b])

    def test_encoded_pattern_embeds_into_grid(self):
        snap = synth_snapshot(SynthProfile("grid", (3, 3), "balanced", seed=1))
        g = graph_from_snapshot(snap)
        circuit = build_encoded_teleport(StatePrep(0.5))
        cand = subgraph_match6(g, interaction_graph(circuit), snap, seed=42)
        assert len(cand.mapping) == 6
        for a, b in circuit.interactions():
            assert g.has_edge(cand.mapping[a], cand.mapping[b])

    @pytest.mark.parametrize("seed", range(8))
    def test_random_graph_embeddings_are_monomorphisms(self, seed):
        rng = np.random.default_rng(100 + seed)
        g = random_graph(rng, max_nodes=10)
        snap = make_snapshot(
            n_qubits=max(g.nodes) + 1, edges=tuple(g.edge_pairs())
        )
        pattern = CouplingGraph.from_pairs(range(3), [(0, 1), (1, 2)])
        try:
            cand = subgraph_match6(g, pattern, snap, seed=7)
        except NoEmbedding:
            assert not enumerate_paths3(g)
            return
        vals = list(cand.mapping.values())
        assert len(set(vals)) == len(vals)
        for a, b in pattern.edge_pairs():
            assert g.has_edge(cand.mapping[a], cand.mapping[b])


class TestValidateCandidate:
    def test_valid(self, line3_snapshot):
        circuit = lower_to_native(build_physical_teleport(StatePrep(1.0)))
        cand = LayoutCandidate({0: 0, 1: 1, 2: 2})
        assert validate_candidate(cand, circuit.interactions(), line3_snapshot) is cand

    def test_unknown_qubit(self, line3_snapshot):
        cand = LayoutCandidate({0: 0, 1: 1, 2: 9})
        with pytest.raises(EdgeNotInSnapshot):
            validate_candidate(cand, [(0, 1), (1, 2)], line3_snapshot)

    def test_missing_edge(self, line3_snapshot):
        cand = LayoutCandidate({0: 0, 1: 2, 2: 1})
        with pytest.raises(EdgeNotInSnapshot):
            validate_candidate(cand, [(0, 1), (1, 2)], line3_snapshot)
