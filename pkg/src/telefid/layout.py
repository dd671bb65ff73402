"""Qubit selection: calibration-threshold filtering of the coupling graph,
3-qubit path enumeration, connected-subgraph matching for the 6-qubit
encoded circuit, and noise scoring of layout candidates."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import EdgeNotInSnapshot, NoEmbedding
from .noise import CalibrationSnapshot, VIRTUAL_KINDS


@dataclass(frozen=True)
class CouplingGraph:
    nodes: frozenset
    edges: frozenset  # of frozenset pairs

    def __post_init__(self):
        for e in self.edges:
            a, b = tuple(e)
            if a == b or a not in self.nodes or b not in self.nodes:
                raise ValueError(f"edge {tuple(sorted(e))} invalid for node set")

    @staticmethod
    def from_pairs(nodes, pairs) -> "CouplingGraph":
        return CouplingGraph(
            frozenset(nodes), frozenset(frozenset(p) for p in pairs)
        )

    def has_edge(self, a, b) -> bool:
        return frozenset((a, b)) in self.edges

    def neighbors(self, node):
        return sorted(
            next(iter(e - {node})) for e in self.edges if node in e
        )

    def degree(self, node) -> int:
        return sum(1 for e in self.edges if node in e)

    def edge_pairs(self):
        return sorted(tuple(sorted(e)) for e in self.edges)


def graph_from_snapshot(snapshot: CalibrationSnapshot) -> CouplingGraph:
    return CouplingGraph.from_pairs(
        snapshot.qubits.keys(), (e.qubits for e in snapshot.edges)
    )


@dataclass(frozen=True)
class FilterThresholds:
    """Admission thresholds: times are lower bounds, errors upper bounds.

    Readout admission compares the mean of the two assignment errors
    against ero_max.
    """

    t1_min: float = 0.0
    t2_min: float = 0.0
    e1q_max: float = 1.0
    e2q_max: float = 1.0
    ero_max: float = 1.0

    def __post_init__(self):
        if min(self.t1_min, self.t2_min, self.e1q_max, self.e2q_max, self.ero_max) < 0:
            raise ValueError("thresholds must be nonnegative")

    def tighter_or_equal(self, other: "FilterThresholds") -> bool:
        return (
            self.t1_min >= other.t1_min
            and self.t2_min >= other.t2_min
            and self.e1q_max <= other.e1q_max
            and self.e2q_max <= other.e2q_max
            and self.ero_max <= other.ero_max
        )


@dataclass
class LayoutCandidate:
    """Assignment of circuit roles to physical qubits.

    ``mapping[logical] = physical``; score is its negative-log success
    weight (lower is better, nan until scored)."""

    mapping: dict
    score: float = float("nan")
    kind: str = "path3"

    def __post_init__(self):
        vals = list(self.mapping.values())
        if len(set(vals)) != len(vals):
            raise ValueError(f"mapping not injective: {self.mapping}")

    def physical(self, logical: int) -> int:
        return self.mapping[logical]

    def label(self) -> str:
        return "-".join(str(self.mapping[q]) for q in sorted(self.mapping))


def filter_graph(snapshot: CalibrationSnapshot, th: FilterThresholds) -> CouplingGraph:
    """Nodes surviving the per-qubit thresholds, edges with both endpoints
    surviving and err_2q below e2q_max.  Empty results are valid."""
    nodes = set()
    for q, cal in snapshot.qubits.items():
        readout = 0.5 * (cal.readout_e01 + cal.readout_e10)
        if (
            cal.t1 >= th.t1_min
            and cal.t2 >= th.t2_min
            and cal.err_1q < th.e1q_max
            and readout < th.ero_max
        ):
            nodes.add(q)
    pairs = [
        e.qubits
        for e in snapshot.edges
        if e.qubits[0] in nodes and e.qubits[1] in nodes and e.err_2q < th.e2q_max
    ]
    return CouplingGraph.from_pairs(nodes, pairs)


def enumerate_paths3(g: CouplingGraph):
    """All 3-qubit paths a-b-c (role order Alice, Mediator, Bob), counted
    once per undirected path via the canonical orientation a < c, in
    sorted order."""
    out = []
    for b in sorted(g.nodes):
        nbrs = g.neighbors(b)
        for a in nbrs:
            for c in nbrs:
                if a < c:
                    out.append(LayoutCandidate({0: a, 1: b, 2: c}, kind="path3"))
    out.sort(key=lambda cand: (cand.mapping[0], cand.mapping[1], cand.mapping[2]))
    return out


def score_layout(cand: LayoutCandidate, circuit, snapshot: CalibrationSnapshot) -> float:
    """Negative-log success product over the circuit's ops under the
    candidate's mapping.  Virtual gates contribute nothing; idle-time terms
    are deliberately omitted (second order at these depths)."""
    score = 0.0
    for op in circuit.ops:
        if op.kind in VIRTUAL_KINDS:
            continue
        phys = [cand.mapping[q] for q in op.qubits]
        if op.kind in ("CX", "CZ"):
            eps = snapshot.edge(*phys).err_2q
        elif op.kind == "MEASURE":
            cal = snapshot.qubit(phys[0])
            eps = 0.5 * (cal.readout_e01 + cal.readout_e10)
        else:
            eps = snapshot.qubit(phys[0]).err_1q
        score += -math.log(1.0 - eps)
    return score


def _monomorphisms(pattern: CouplingGraph, g: CouplingGraph):
    """All injective maps pattern->g sending pattern edges to g edges
    (VF2-style backtracking with degree pruning)."""
    p_nodes = sorted(pattern.nodes, key=lambda n: -pattern.degree(n))
    g_nodes = sorted(g.nodes)
    p_adj = {n: set(pattern.neighbors(n)) for n in pattern.nodes}
    g_adj = {n: set(g.neighbors(n)) for n in g.nodes}
    assignment = {}
    used = set()
    found = []

    def candidates(p):
        mapped_nbrs = [assignment[q] for q in p_adj[p] if q in assignment]
        if mapped_nbrs:
            pool = set.intersection(*(g_adj[m] for m in mapped_nbrs))
        else:
            pool = g.nodes
        return sorted(pool - used)

    def extend(i):
        if i == len(p_nodes):
            found.append(dict(assignment))
            return
        p = p_nodes[i]
        for t in candidates(p):
            if len(g_adj[t]) < len(p_adj[p]):
                continue
            assignment[p] = t
            used.add(t)
            extend(i + 1)
            used.remove(t)
            del assignment[p]

    extend(0)
    return found


def enumerate_embeddings(g: CouplingGraph, pattern: CouplingGraph):
    """All embeddings of ``pattern`` into ``g`` as unscored candidates, in
    the deterministic backtracking order."""
    return [
        LayoutCandidate(mapping, kind="subgraph6")
        for mapping in _monomorphisms(pattern, g)
    ]


def subgraph_match6(
    g: CouplingGraph,
    pattern: CouplingGraph,
    snapshot: CalibrationSnapshot,
    seed: int,
    circuit=None,
) -> LayoutCandidate:
    """Best-scoring embedding of the encoded circuit's interaction graph.

    Enumerates all monomorphisms, scores each (via score_layout when the
    native-gate circuit is supplied, otherwise by edge + readout terms),
    and picks the minimum; ties are broken by a seed-deterministic
    permutation of the candidate order before a stable min scan.
    """
    cands = enumerate_embeddings(g, pattern)
    if not cands:
        raise NoEmbedding(
            f"pattern with {len(pattern.nodes)} nodes has no embedding into the filtered graph"
        )
    for cand in cands:
        if circuit is not None:
            cand.score = score_layout(cand, circuit, snapshot)
        else:
            cand.score = _edge_score(cand.mapping, pattern, snapshot)
    order = list(range(len(cands)))
    random.Random(seed).shuffle(order)
    best = min(order, key=lambda i: cands[i].score)
    return cands[best]


def _edge_score(mapping, pattern: CouplingGraph, snapshot: CalibrationSnapshot) -> float:
    score = 0.0
    for e in pattern.edges:
        a, b = tuple(e)
        score += -math.log(1.0 - snapshot.edge(mapping[a], mapping[b]).err_2q)
    for p, t in mapping.items():
        cal = snapshot.qubit(t)
        score += -math.log(1.0 - 0.5 * (cal.readout_e01 + cal.readout_e10))
    return score


def validate_candidate(cand: LayoutCandidate, interactions, snapshot: CalibrationSnapshot):
    """Check an explicit layout against the snapshot: every mapped qubit is
    calibrated and every logical interaction lands on a known edge."""
    for q in cand.mapping.values():
        if q not in snapshot.qubits:
            raise EdgeNotInSnapshot(f"mapped qubit {q} not in snapshot")
    for a, b in interactions:
        pa, pb = cand.mapping.get(a), cand.mapping.get(b)
        if pa is None or pb is None:
            raise EdgeNotInSnapshot(f"interaction ({a},{b}) not covered by mapping")
        if not snapshot.has_edge(pa, pb):
            raise EdgeNotInSnapshot(f"interaction ({a},{b}) maps to missing edge ({pa},{pb})")
    return cand
