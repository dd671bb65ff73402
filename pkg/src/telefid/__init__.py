"""telefid: layer-wise fidelity attribution for noisy teleportation pipelines.

A dense density-matrix engine (qsim) drives calibrated noise channels
(noise) through teleportation circuits (circuits) on selected qubit layouts
(layout); the pipeline module attributes end-to-end fidelity to the
individual decision layers.  calio handles snapshots and results on disk;
server/cli expose the whole thing over HTTP and the command line.
"""

from .calio import (
    EngineConfig,
    RunRecord,
    SynthProfile,
    load_config,
    load_snapshot,
    read_results,
    synth_snapshot,
    write_results,
    write_snapshot,
)
from .circuits import (
    ALL_DRAG,
    ALL_GAUSSIAN_SQUARE,
    ALL_SQUARE,
    Circuit,
    GateOp,
    PulseAssignment,
    SimResult,
    build_encoded_teleport,
    build_physical_teleport,
    circuit_from_text,
    circuit_to_text,
    interaction_graph,
    simulate,
    teleport_fidelity,
    transpile,
)
from .errors import EngineError
from .layout import (
    CouplingGraph,
    FilterThresholds,
    LayoutCandidate,
    enumerate_paths3,
    filter_graph,
    graph_from_snapshot,
    score_layout,
    subgraph_match6,
)
from .noise import (
    CalibrationSnapshot,
    EdgeCal,
    QubitCal,
    ShapeFactorTable,
    confusion,
    gate_channel,
    residual_pauli_channel,
    thermal_relaxation_channel,
)
from .pipeline import (
    BandReport,
    PipelineConfig,
    WaterfallReport,
    ablation_band,
    filter_cascade,
    l3_isolation,
    layer_contribution,
    noise_sweep,
    run,
    waterfall,
)
from .qsim import (
    DensityMatrix,
    KrausChannel,
    StatePrep,
    apply_channel,
    apply_unitary,
    fidelity,
    init_state,
    measure_instrument,
    partial_trace,
)

__version__ = "0.1.0"
