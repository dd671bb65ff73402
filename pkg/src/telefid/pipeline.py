"""The attribution engine: runs full pipeline configurations and decomposes
fidelity into per-layer contributions via ablation bands, waterfalls,
filter cascades, pulse-shape isolation, and noise-scale sweeps.

Everything here is a pure function of (config, snapshot, seed); repeated
calls are bit-identical, and sweep elements are independent, so callers may
parallelize freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import circuits as circ
from .calio import RunRecord
from .circuits import (
    ALL_SQUARE,
    PulseAssignment,
    UNIFORM_ASSIGNMENTS,
    assignment_grid,
    build_encoded_teleport,
    build_physical_teleport,
    interaction_graph,
    lower_to_native,
    simulate,
    teleport_fidelity,
    transpile,
)
from .errors import EmptySweep, NoEmbedding, ReferenceMismatch
from .layout import (
    FilterThresholds,
    LayoutCandidate,
    enumerate_embeddings,
    enumerate_paths3,
    filter_graph,
    graph_from_snapshot,
    score_layout,
    subgraph_match6,
    validate_candidate,
)
from .noise import DEFAULT_SHAPE_FACTORS, CalibrationSnapshot, ShapeFactorTable
from .qsim import StatePrep

DEFAULT_SEED = 42

# Paper-style baseline admission gate: topology-valid qubits with sane
# coherence, before any noise-aware tightening.
BASELINE_THRESHOLDS = FilterThresholds(
    t1_min=30.0, t2_min=15.0, e1q_max=0.01, e2q_max=0.10, ero_max=1.0
)


@dataclass
class PipelineConfig:
    """One full decision vector: mode, input state, layout source, pulse
    shapes, and global noise scale."""

    mode: str
    prep: StatePrep
    layout_source: object  # LayoutCandidate | FilterThresholds
    pulse: PulseAssignment = ALL_SQUARE
    ns: float = 1.0

    def __post_init__(self):
        if self.mode not in ("physical", "encoded"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not isinstance(self.layout_source, (LayoutCandidate, FilterThresholds)):
            raise ValueError("layout_source must be a LayoutCandidate or FilterThresholds")
        if self.ns < 0:
            raise ValueError(f"ns={self.ns} must be >= 0")


@dataclass
class BandReport:
    n_configs: int
    f_best: float
    f_worst: float
    band: float
    reference_best: float = None


@dataclass
class WaterfallReport:
    f_baseline: float
    f_after_l2: float
    f_after_l3: float
    delta_l2: float
    delta_l3: float
    total: float
    baseline_layout: str = ""
    selected_layout: str = ""
    optimal_pulse: PulseAssignment = ALL_SQUARE


@dataclass
class LayerContribution:
    layer: str
    c: float


@dataclass
class CascadeRow:
    stage: int
    thresholds: FilterThresholds
    path_count: int
    f_worst: float = None
    f_best: float = None
    band: float = None


@dataclass
class L3IsolationReport:
    scores: dict  # (sx, cz, meas) shape tuple -> fidelity
    uniform: dict  # "all_square" etc. -> fidelity
    optimal: PulseAssignment = ALL_SQUARE
    optimal_f: float = 0.0


@dataclass
class SweepRow:
    theta: float
    phi: float
    ns: float
    f_phys: float = None
    f_log: float = None
    accept: float = None
    records: tuple = ()


# ---------------------------------------------------------------------------
# Layout resolution


def _builder(mode: str):
    return build_physical_teleport if mode == "physical" else build_encoded_teleport


def resolve_layout(
    mode: str,
    prep: StatePrep,
    snapshot: CalibrationSnapshot,
    source,
    seed: int = DEFAULT_SEED,
) -> LayoutCandidate:
    """Turn a layout source into a concrete candidate.

    Explicit candidates are validated against the snapshot.  Thresholds run
    the mode's search: minimum-score 3-qubit path for physical, seeded
    subgraph matching for encoded."""
    circuit = _builder(mode)(prep)
    native = lower_to_native(circuit)
    if isinstance(source, LayoutCandidate):
        return validate_candidate(source, native.interactions(), snapshot)
    graph = filter_graph(snapshot, source)
    if mode == "encoded":
        return subgraph_match6(
            graph, interaction_graph(circuit), snapshot, seed, circuit=native
        )
    candidates = enumerate_paths3(graph)
    if not candidates:
        raise NoEmbedding("no 3-qubit path survives the thresholds")
    for cand in candidates:
        cand.score = score_layout(cand, native, snapshot)
    return min(candidates, key=lambda cand: cand.score)


def run(
    config: PipelineConfig,
    snapshot: CalibrationSnapshot,
    factors: ShapeFactorTable = DEFAULT_SHAPE_FACTORS,
    seed: int = DEFAULT_SEED,
):
    """Build, select layout, transpile, simulate; returns (F, accept)."""
    layout = resolve_layout(config.mode, config.prep, snapshot, config.layout_source, seed)
    return _run_with_layout(
        config.mode, config.prep, snapshot, layout, config.pulse, config.ns, factors
    )


def _run_with_layout(mode, prep, snapshot, layout, pulse, ns, factors):
    circuit = _builder(mode)(prep)
    native = transpile(circuit, layout, graph_from_snapshot(snapshot))
    result = simulate(native, snapshot, layout, pulse, ns, factors)
    return teleport_fidelity(result, prep)


# ---------------------------------------------------------------------------
# Attribution operations


def ablation_band(
    configs,
    snapshot: CalibrationSnapshot,
    reference_best: float = None,
    factors: ShapeFactorTable = DEFAULT_SHAPE_FACTORS,
    seed: int = DEFAULT_SEED,
) -> BandReport:
    """Run every config; the band is the spread from the worst result up to
    the best observed (or up to the fixed reference when given)."""
    configs = list(configs)
    if not configs:
        raise EmptySweep("ablation over zero configurations")
    fids = [run(cfg, snapshot, factors, seed)[0] for cfg in configs]
    f_best, f_worst = max(fids), min(fids)
    top = reference_best if reference_best is not None else f_best
    return BandReport(
        n_configs=len(configs),
        f_best=f_best,
        f_worst=f_worst,
        band=max(0.0, top - f_worst),
        reference_best=reference_best,
    )


def layer_contribution(before: BandReport, after: BandReport, layer: str = "") -> LayerContribution:
    """Band narrowing induced by fixing one layer: C = band_before - band_after."""
    if before.reference_best != after.reference_best:
        raise ReferenceMismatch(
            f"reports use different references: {before.reference_best} vs {after.reference_best}"
        )
    return LayerContribution(layer=layer, c=before.band - after.band)


def _best_assignment(mode, prep, snapshot, layout, ns, factors):
    """Exhaustive search over all 27 shape assignments; first maximum in
    grid order wins ties."""
    scores = {}
    best, best_f = None, -1.0
    for assignment in assignment_grid():
        f, _ = _run_with_layout(mode, prep, snapshot, layout, assignment, ns, factors)
        scores[assignment.astuple()] = f
        if f > best_f:
            best, best_f = assignment, f
    return best, best_f, scores


def waterfall(
    prep: StatePrep,
    snapshot: CalibrationSnapshot,
    baseline_rule: str = "first",
    mode: str = "physical",
    ns: float = 1.0,
    thresholds: FilterThresholds = BASELINE_THRESHOLDS,
    factors: ShapeFactorTable = DEFAULT_SHAPE_FACTORS,
    seed: int = DEFAULT_SEED,
) -> WaterfallReport:
    """Three-stage fidelity trace: baseline layout with uniform Square,
    then the min-score layout (L2), then per-gate optimal shapes (L3).
    The deltas add up to the total exactly by construction."""
    if baseline_rule not in ("first", "worst"):
        raise ValueError(f"unknown baseline_rule {baseline_rule!r}")
    circuit = _builder(mode)(prep)
    native = lower_to_native(circuit)
    graph = filter_graph(snapshot, thresholds)
    if mode == "encoded":
        embeddings = enumerate_embeddings(graph, interaction_graph(circuit))
        if not embeddings:
            raise NoEmbedding("no admissible embedding under the baseline thresholds")
        for cand in embeddings:
            cand.score = score_layout(cand, native, snapshot)
        baseline_layout = (
            embeddings[0]
            if baseline_rule == "first"
            else max(embeddings, key=lambda cand: cand.score)
        )
        selected = subgraph_match6(
            graph, interaction_graph(circuit), snapshot, seed, circuit=native
        )
    else:
        candidates = enumerate_paths3(graph)
        if not candidates:
            raise NoEmbedding("no admissible path under the baseline thresholds")
        for cand in candidates:
            cand.score = score_layout(cand, native, snapshot)
        baseline_layout = (
            candidates[0]
            if baseline_rule == "first"
            else max(candidates, key=lambda cand: cand.score)
        )
        selected = min(candidates, key=lambda cand: cand.score)

    f_baseline, _ = _run_with_layout(mode, prep, snapshot, baseline_layout, ALL_SQUARE, ns, factors)
    f_after_l2, _ = _run_with_layout(mode, prep, snapshot, selected, ALL_SQUARE, ns, factors)
    optimal, f_after_l3, _ = _best_assignment(mode, prep, snapshot, selected, ns, factors)
    return WaterfallReport(
        f_baseline=f_baseline,
        f_after_l2=f_after_l2,
        f_after_l3=f_after_l3,
        delta_l2=f_after_l2 - f_baseline,
        delta_l3=f_after_l3 - f_after_l2,
        total=f_after_l3 - f_baseline,
        baseline_layout=baseline_layout.label(),
        selected_layout=selected.label(),
        optimal_pulse=optimal,
    )


def filter_cascade(
    snapshot: CalibrationSnapshot,
    stages,
    prep: StatePrep,
    reference_best: float = None,
    mode: str = "physical",
    ns: float = 1.0,
    factors: ShapeFactorTable = DEFAULT_SHAPE_FACTORS,
):
    """Cumulative threshold cascade: per stage, enumerate surviving paths,
    run each with uniform Square, and report the worst fidelity and band.
    Stages must tighten monotonically; a stage with zero paths is reported
    with empty stats rather than erroring."""
    stages = list(stages)
    for prev, nxt in zip(stages, stages[1:]):
        if not nxt.tighter_or_equal(prev):
            raise ValueError("cascade stages must be cumulative (each tighter than the last)")
    circuit = _builder(mode)(prep)
    native = lower_to_native(circuit)
    rows = []
    for i, th in enumerate(stages):
        graph = filter_graph(snapshot, th)
        candidates = enumerate_paths3(graph)
        if not candidates:
            rows.append(CascadeRow(stage=i, thresholds=th, path_count=0))
            continue
        fids = [
            _run_with_layout(mode, prep, snapshot, cand, ALL_SQUARE, ns, factors)[0]
            for cand in candidates
        ]
        f_best, f_worst = max(fids), min(fids)
        top = reference_best if reference_best is not None else f_best
        rows.append(
            CascadeRow(
                stage=i,
                thresholds=th,
                path_count=len(candidates),
                f_worst=f_worst,
                f_best=f_best,
                band=max(0.0, top - f_worst),
            )
        )
    return rows


def l3_isolation(
    snapshot: CalibrationSnapshot,
    layout: LayoutCandidate,
    prep: StatePrep,
    ns: float = 1.0,
    mode: str = "physical",
    factors: ShapeFactorTable = DEFAULT_SHAPE_FACTORS,
) -> L3IsolationReport:
    """Fix the layout and sweep pulse shapes: the three uniform assignments
    plus the exhaustive per-gate optimum."""
    optimal, optimal_f, scores = _best_assignment(mode, prep, snapshot, layout, ns, factors)
    uniform = {
        name: scores[assignment.astuple()]
        for name, assignment in UNIFORM_ASSIGNMENTS.items()
    }
    return L3IsolationReport(scores=scores, uniform=uniform, optimal=optimal, optimal_f=optimal_f)


def noise_sweep(
    snapshot: CalibrationSnapshot,
    preps,
    scales,
    modes=("physical", "encoded"),
    pulse: PulseAssignment = ALL_SQUARE,
    thresholds: FilterThresholds = None,
    layouts: dict = None,
    factors: ShapeFactorTable = DEFAULT_SHAPE_FACTORS,
    seed: int = DEFAULT_SEED,
):
    """One row per (prep, ns) with physical and/or conditional-logical
    fidelity plus syndrome acceptance.  Layouts are noise-score selected
    once per mode (or passed explicitly via ``layouts``)."""
    scales = list(scales)
    if scales != sorted(scales):
        raise ValueError("scales must be sorted ascending")
    preps = list(preps)
    if not preps or not scales:
        raise EmptySweep("noise sweep needs at least one prep and one scale")
    source = thresholds if thresholds is not None else FilterThresholds()
    resolved = dict(layouts or {})
    for mode in modes:
        if mode not in resolved:
            resolved[mode] = resolve_layout(mode, preps[0], snapshot, source, seed)

    rows = []
    for prep in preps:
        for ns in scales:
            row = SweepRow(theta=prep.theta, phi=prep.phi, ns=ns)
            records = []
            if "physical" in modes:
                f, acc = _run_with_layout(
                    "physical", prep, snapshot, resolved["physical"], pulse, ns, factors
                )
                row.f_phys = f
                records.append(
                    _record("physical", prep, resolved["physical"], pulse, ns, f, acc)
                )
            if "encoded" in modes:
                f, acc = _run_with_layout(
                    "encoded", prep, snapshot, resolved["encoded"], pulse, ns, factors
                )
                row.f_log = f
                row.accept = acc
                records.append(
                    _record("encoded", prep, resolved["encoded"], pulse, ns, f, acc)
                )
            row.records = tuple(records)
            rows.append(row)
    return rows


def _record(mode, prep, layout, pulse, ns, fidelity, accept) -> RunRecord:
    return RunRecord(
        mode=mode,
        theta=prep.theta,
        phi=prep.phi,
        layout=layout.label(),
        pulse_sx=pulse.sx,
        pulse_cz=pulse.cz,
        pulse_meas=pulse.measure,
        ns=ns,
        fidelity=fidelity,
        accept=accept,
    )


def sweep_records(rows, repeats: int = 1):
    """Flatten sweep rows into CSV records; ``repeats`` duplicates each row
    to mirror external logging schemas (the simulation itself is
    deterministic, so repeats carry no statistical content)."""
    out = []
    for row in rows:
        for rec in row.records:
            out.extend([rec] * repeats)
    return out
