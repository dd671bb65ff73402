"""Teleportation circuit construction, native-gate rewriting, and noisy
simulation with deterministic branch enumeration.

Feedforward corrections are controlled by RECORDED classical bits, so a
misread measurement propagates into a wrong correction; that is the readout
error pathway, modeled without any shot sampling.  The full branch tree
(<= 16 branches) replaces Monte Carlo: density-matrix evolution is
deterministic and stays that way here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import noise as noise_mod
from . import qsim
from .errors import EngineError, RoutingRequired
from .layout import CouplingGraph, LayoutCandidate
from .noise import PULSE_SHAPES, VIRTUAL_KINDS, CalibrationSnapshot, ShapeFactorTable
from .qsim import DensityMatrix, StatePrep

NATIVE_KINDS = ("RZ", "SX", "X", "CZ", "MEASURE", "COND_X", "COND_Z")
ALL_KINDS = NATIVE_KINDS + ("H", "CX")

_TWO_QUBIT_KINDS = ("CX", "CZ")
_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple
    angle: float = None
    cbit: int = None
    shape: str = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in _TWO_QUBIT_KINDS:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.kind} needs 2 distinct qubits, got {self.qubits}")
        elif len(self.qubits) != 1:
            raise ValueError(f"{self.kind} acts on exactly 1 qubit, got {self.qubits}")
        if self.kind in ("MEASURE", "COND_X", "COND_Z") and self.cbit is None:
            raise ValueError(f"{self.kind} requires a classical bit index")
        if self.kind == "RZ" and self.angle is None:
            raise ValueError("RZ requires an angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in _TWO_QUBIT_KINDS


@dataclass(frozen=True)
class AcceptCheck:
    """One syndrome pair: recorded bits at ``cbits`` must land in ``accepted``."""

    cbits: tuple
    accepted: frozenset


@dataclass
class CircuitMeta:
    roles: dict = field(default_factory=dict)  # role name -> qubit tuple
    two_qubit_count: int = 0
    output_qubits: tuple = ()
    accept_checks: tuple = ()


@dataclass
class Circuit:
    n_qubits: int
    n_cbits: int
    ops: list
    mode: str  # "physical" | "encoded"
    meta: CircuitMeta = field(default_factory=CircuitMeta)

    def validate(self):
        if self.mode not in ("physical", "encoded"):
            raise ValueError(f"unknown mode {self.mode!r}")
        written = set()
        two_q = 0
        for op in self.ops:
            if op.is_two_qubit:
                two_q += 1
            if op.kind == "MEASURE":
                written.add(op.cbit)
            elif op.kind in ("COND_X", "COND_Z") and op.cbit not in written:
                raise ValueError(f"classical bit {op.cbit} read before written")
        if two_q != self.meta.two_qubit_count:
            raise ValueError(
                f"two_qubit_count metadata {self.meta.two_qubit_count} != actual {two_q}"
            )
        return self

    def qubit_labels(self):
        labels = set()
        for op in self.ops:
            labels.update(op.qubits)
        for qs in self.meta.roles.values():
            labels.update(qs)
        labels.update(self.meta.output_qubits)
        return sorted(labels)

    def interactions(self):
        """Distinct (a, b) pairs touched by 2-qubit ops."""
        return sorted({tuple(sorted(op.qubits)) for op in self.ops if op.is_two_qubit})


def interaction_graph(circuit: Circuit) -> CouplingGraph:
    return CouplingGraph.from_pairs(circuit.qubit_labels(), circuit.interactions())


@dataclass(frozen=True)
class PulseAssignment:
    """Pulse envelope per native gate class."""

    sx: str = "square"
    cz: str = "square"
    measure: str = "square"

    def __post_init__(self):
        for val in (self.sx, self.cz, self.measure):
            if val not in PULSE_SHAPES:
                raise ValueError(f"unknown pulse shape {val!r}")

    def shape_for(self, gate_class: str) -> str:
        return {"sx": self.sx, "cz": self.cz, "measure": self.measure}[gate_class]

    def astuple(self):
        return (self.sx, self.cz, self.measure)


ALL_SQUARE = PulseAssignment("square", "square", "square")
ALL_GAUSSIAN_SQUARE = PulseAssignment("gaussian_square", "gaussian_square", "gaussian_square")
ALL_DRAG = PulseAssignment("drag", "drag", "drag")
UNIFORM_ASSIGNMENTS = {
    "all_square": ALL_SQUARE,
    "all_gaussian_square": ALL_GAUSSIAN_SQUARE,
    "all_drag": ALL_DRAG,
}


def assignment_grid():
    """All 27 per-class shape assignments in a fixed deterministic order."""
    for sx in PULSE_SHAPES:
        for cz in PULSE_SHAPES:
            for meas in PULSE_SHAPES:
                yield PulseAssignment(sx, cz, meas)


@dataclass
class SimResult:
    output_state: DensityMatrix
    accept_prob: float
    branch_log: dict  # recorded-bit tuple -> probability


# ---------------------------------------------------------------------------
# Builders


def _prep_ops(q: int, prep: StatePrep):
    """Rz(phi)·Ry(theta)|0> as the native sequence SX, RZ(theta+pi), SX,
    RZ(phi+pi) (equal up to global phase)."""
    return [
        GateOp("SX", (q,)),
        GateOp("RZ", (q,), angle=prep.theta + math.pi),
        GateOp("SX", (q,)),
        GateOp("RZ", (q,), angle=prep.phi + math.pi),
    ]


def build_physical_teleport(prep: StatePrep) -> Circuit:
    """Three-qubit teleportation: Alice=0, Mediator=1, Bob=2.

    Bell pair on (1,2), Bell measurement of (0,1) into (c0,c1), then X/Z
    corrections on Bob keyed by the recorded bits."""
    ops = _prep_ops(0, prep) + [
        GateOp("H", (1,)),
        GateOp("CX", (1, 2)),
        GateOp("CX", (0, 1)),
        GateOp("H", (0,)),
        GateOp("MEASURE", (0,), cbit=0),
        GateOp("MEASURE", (1,), cbit=1),
        GateOp("COND_X", (2,), cbit=1),
        GateOp("COND_Z", (2,), cbit=0),
    ]
    meta = CircuitMeta(
        roles={"alice": (0,), "mediator": (1,), "bob": (2,)},
        two_qubit_count=2,
        output_qubits=(2,),
        accept_checks=(),
    )
    return Circuit(3, 2, ops, "physical", meta).validate()


_PAIR_00_11 = frozenset({(0, 0), (1, 1)})
_PAIR_ANY = frozenset({(0, 0), (0, 1), (1, 0), (1, 1)})


def build_encoded_teleport(prep: StatePrep) -> Circuit:
    """Error-detected teleportation on the two-qubit repetition code
    (|0_L>=|00>, |1_L>=|11>, X_L=XX, Z_L=ZI).

    Alice=(0,1), Mediator=(2,3), Bob=(4,5).  The transversal CX pair plus
    X-basis readout of both Alice qubits realizes the logical Bell
    measurement; the X_L outcome is the parity c0^c1, so the Z_L correction
    is applied as two single-bit-conditioned Z ops.  Acceptance requires the
    computational-basis pair (c2,c3) to land in {00,11}; all four X-basis
    outcomes are code-consistent, so that pair never rejects."""
    ops = _prep_ops(0, prep) + [
        GateOp("CX", (0, 1)),  # encode Alice
        GateOp("H", (2,)),  # logical Bell pair between Mediator and Bob
        GateOp("CX", (2, 4)),
        GateOp("CX", (2, 3)),
        GateOp("CX", (4, 5)),
        GateOp("CX", (0, 2)),  # transversal logical CX
        GateOp("CX", (1, 3)),
        GateOp("H", (0,)),  # X-basis readout of X_L = X(x)X
        GateOp("H", (1,)),
        GateOp("MEASURE", (0,), cbit=0),
        GateOp("MEASURE", (1,), cbit=1),
        GateOp("MEASURE", (2,), cbit=2),
        GateOp("MEASURE", (3,), cbit=3),
        GateOp("COND_X", (4,), cbit=2),  # X_L keyed by the Z_L readout (Z x I)
        GateOp("COND_X", (5,), cbit=2),
        GateOp("COND_Z", (4,), cbit=0),  # Z_L = Z(q4), keyed by parity c0^c1
        GateOp("COND_Z", (4,), cbit=1),
    ]
    meta = CircuitMeta(
        roles={"alice": (0, 1), "mediator": (2, 3), "bob": (4, 5)},
        two_qubit_count=6,
        output_qubits=(4, 5),
        accept_checks=(
            AcceptCheck((2, 3), _PAIR_00_11),
            AcceptCheck((0, 1), _PAIR_ANY),
        ),
    )
    return Circuit(6, 4, ops, "encoded", meta).validate()


# ---------------------------------------------------------------------------
# Native-gate rewriting


def _h_expansion(q: int):
    half_pi = math.pi / 2
    return [
        GateOp("RZ", (q,), angle=half_pi),
        GateOp("SX", (q,)),
        GateOp("RZ", (q,), angle=half_pi),
    ]


def _lower_op(op: GateOp):
    if op.kind == "H":
        return _h_expansion(op.qubits[0])
    if op.kind == "CX":
        a, b = op.qubits
        return _h_expansion(b) + [GateOp("CZ", (a, b), shape=op.shape)] + _h_expansion(b)
    return [op]


def _merge_rz(ops):
    """Fuse consecutive RZ on the same qubit; drop angles that are 0 mod 2pi."""
    pending = {}
    out = []

    def flush(q):
        angle = pending.pop(q, 0.0) % (2 * math.pi)
        if _ANGLE_TOL < angle < 2 * math.pi - _ANGLE_TOL:
            out.append(GateOp("RZ", (q,), angle=angle))

    for op in ops:
        if op.kind == "RZ":
            pending[op.qubits[0]] = pending.get(op.qubits[0], 0.0) + op.angle
            continue
        for q in op.qubits:
            if q in pending:
                flush(q)
        out.append(op)
    for q in sorted(pending):
        flush(q)
    return out


def lower_to_native(circuit: Circuit) -> Circuit:
    """Rewrite to the native gate set on the original (logical) indices."""
    ops = []
    for op in circuit.ops:
        ops.extend(_lower_op(op))
    ops = _merge_rz(ops)
    meta = replace(
        circuit.meta, two_qubit_count=sum(1 for op in ops if op.is_two_qubit)
    )
    return Circuit(circuit.n_qubits, circuit.n_cbits, ops, circuit.mode, meta).validate()


def transpile(circuit: Circuit, layout: LayoutCandidate, graph: CouplingGraph) -> Circuit:
    """Native rewrite plus layout application.

    Gate set becomes {RZ, SX, X, CZ, MEASURE, COND_X, COND_Z}; qubit indices
    are replaced by physical ones; every 2-qubit op must land on a coupling
    edge (SWAP insertion is out of scope)."""
    native = lower_to_native(circuit)
    mapping = layout.mapping
    missing = [q for q in native.qubit_labels() if q not in mapping]
    if missing:
        raise RoutingRequired(f"layout does not map circuit qubits {missing}")
    for a, b in native.interactions():
        if not graph.has_edge(mapping[a], mapping[b]):
            raise RoutingRequired(
                f"2-qubit op ({a},{b}) maps to ({mapping[a]},{mapping[b]}), "
                "not a coupling edge"
            )
    ops = [replace(op, qubits=tuple(mapping[q] for q in op.qubits)) for op in native.ops]
    meta = CircuitMeta(
        roles={r: tuple(mapping[q] for q in qs) for r, qs in native.meta.roles.items()},
        two_qubit_count=native.meta.two_qubit_count,
        output_qubits=tuple(mapping[q] for q in native.meta.output_qubits),
        accept_checks=native.meta.accept_checks,
    )
    return Circuit(native.n_qubits, native.n_cbits, ops, native.mode, meta).validate()


# ---------------------------------------------------------------------------
# Simulation


def _op_unitary(op: GateOp):
    if op.kind == "RZ":
        return qsim.rz(op.angle)
    return {
        "SX": qsim.SX,
        "X": qsim.X,
        "H": qsim.H,
        "CX": qsim.CX,
        "CZ": qsim.CZ,
        "COND_X": qsim.X,
        "COND_Z": qsim.Z,
    }[op.kind]


class _NoiseCache:
    """Per-simulation cache of gate channels and confusion matrices."""

    def __init__(self, snapshot, pulse, ns, factors):
        self.snapshot = snapshot
        self.pulse = pulse
        self.ns = ns
        self.factors = factors
        self._channels = {}
        self._confusions = {}

    @property
    def noiseless(self):
        return self.ns == 0.0 or self.snapshot is None

    def channel(self, op: GateOp, phys_qubits):
        if self.noiseless or op.kind in VIRTUAL_KINDS:
            return None
        gate_class = noise_mod._KIND_TO_CLASS[op.kind]
        shape = op.shape or self.pulse.shape_for(gate_class)
        key = (gate_class, tuple(phys_qubits), shape)
        if key not in self._channels:
            self._channels[key] = noise_mod.gate_channel(
                self.snapshot, op.kind, phys_qubits, shape, self.ns, self.factors
            )
        return self._channels[key]

    def confusion(self, phys_qubit):
        if self.noiseless:
            return np.eye(2)
        if phys_qubit not in self._confusions:
            self._confusions[phys_qubit] = noise_mod.confusion(
                self.snapshot, phys_qubit, self.ns
            )
        return self._confusions[phys_qubit]


def simulate(
    circuit: Circuit,
    snapshot: CalibrationSnapshot = None,
    layout: LayoutCandidate = None,
    pulse: PulseAssignment = ALL_SQUARE,
    ns: float = 1.0,
    factors: ShapeFactorTable = noise_mod.DEFAULT_SHAPE_FACTORS,
) -> SimResult:
    """Walk the circuit over the full recorded-outcome branch tree.

    Each gate applies its ideal unitary followed by its noise channel; each
    MEASURE applies relaxation over the measurement window, then the
    confusion-filtered instrument, splitting every branch by recorded bit.
    Conditional corrections fire in branches whose recorded bit is 1.

    The circuit's qubit labels (logical or physical) are packed into a
    compact register; noise lookups use the original labels against the
    snapshot.  With ns=0 the snapshot is never consulted.
    """
    labels = circuit.qubit_labels()
    pos = {q: i for i, q in enumerate(labels)}
    if layout is not None:
        unmapped = [q for q in labels if q not in set(layout.mapping.values())]
        if unmapped:
            raise RoutingRequired(f"circuit qubits {unmapped} missing from layout")
    cache = _NoiseCache(snapshot, pulse, ns, factors)

    n = len(labels)
    rho0 = DensityMatrix(n, np.zeros((2**n, 2**n), dtype=complex))
    rho0.data[0, 0] = 1.0
    bits0 = (None,) * circuit.n_cbits
    branches = [(1.0, bits0, rho0)]

    for op in circuit.ops:
        sim_targets = [pos[q] for q in op.qubits]
        if op.kind == "MEASURE":
            relax = cache.channel(op, op.qubits)
            conf = cache.confusion(op.qubits[0])
            split = []
            for prob, bits, rho in branches:
                if relax is not None:
                    rho = qsim.apply_channel(rho, relax, sim_targets)
                for recorded, p, post in qsim.measure_instrument(
                    rho, sim_targets[0], conf
                ):
                    if post is None:
                        continue
                    new_bits = list(bits)
                    new_bits[op.cbit] = recorded
                    split.append((prob * p, tuple(new_bits), post))
            branches = split
            continue
        if op.kind in ("COND_X", "COND_Z"):
            ch = cache.channel(op, op.qubits) if op.kind == "COND_X" else None
            updated = []
            for prob, bits, rho in branches:
                if bits[op.cbit] == 1:
                    rho = qsim.apply_unitary(rho, _op_unitary(op), sim_targets)
                    if ch is not None:
                        rho = qsim.apply_channel(rho, ch, sim_targets)
                updated.append((prob, bits, rho))
            branches = updated
            continue
        u = _op_unitary(op)
        ch = cache.channel(op, op.qubits)
        updated = []
        for prob, bits, rho in branches:
            rho = qsim.apply_unitary(rho, u, sim_targets)
            if ch is not None:
                rho = qsim.apply_channel(rho, ch, sim_targets)
            updated.append((prob, bits, rho))
        branches = updated

    branch_log = {}
    for prob, bits, _ in branches:
        key = tuple(0 if b is None else b for b in bits)
        branch_log[key] = branch_log.get(key, 0.0) + prob

    def accepted(bits):
        return all(
            tuple(bits[c] for c in check.cbits) in check.accepted
            for check in circuit.meta.accept_checks
        )

    kept = [(p, b, r) for p, b, r in branches if accepted(b)]
    accept_prob = sum(p for p, _, _ in kept)
    if circuit.mode == "physical":
        accept_prob = 1.0
    if accept_prob <= 1e-12 or not kept:
        raise EngineError("all branches rejected; no output state")

    dim = 2 ** len(labels)
    mixed = np.zeros((dim, dim), dtype=complex)
    for p, _, rho in kept:
        mixed += p * rho.data
    mixed /= sum(p for p, _, _ in kept)
    rho_out = DensityMatrix(len(labels), mixed)

    out_positions = [pos[q] for q in circuit.meta.output_qubits]
    reduced = qsim.partial_trace(rho_out, out_positions)
    if circuit.mode == "encoded":
        reduced = _decode_repetition_pair(reduced)
    return SimResult(reduced, float(accept_prob), branch_log)


def _decode_repetition_pair(rho: DensityMatrix) -> DensityMatrix:
    """Project the 2-qubit block onto span{|00>,|11>}, renormalize, and map
    codewords to the logical basis.  Weight outside the codespace (detected
    bit flips on the output pair) is discarded here; undetected Z-type
    errors pass straight through."""
    dec = np.zeros((2, 4), dtype=complex)
    dec[0, 0] = 1.0
    dec[1, 3] = 1.0
    logical = dec @ rho.data @ dec.conj().T
    tr = np.trace(logical).real
    if tr <= 1e-12:
        raise EngineError("output state has no support on the codespace")
    return DensityMatrix(1, logical / tr)


def teleport_fidelity(result: SimResult, prep: StatePrep):
    """(fidelity against the prepared state, acceptance probability)."""
    return qsim.fidelity(result.output_state, prep), result.accept_prob


# ---------------------------------------------------------------------------
# Line-oriented text serialization (debugging / UI display)


def circuit_to_text(circuit: Circuit) -> str:
    """One op per line: ``KIND q [q2] [angle] [cbit] [shape]``."""
    lines = [
        f"# telefid-circuit v1 mode={circuit.mode} "
        f"qubits={circuit.n_qubits} cbits={circuit.n_cbits}"
    ]
    for op in circuit.ops:
        parts = [op.kind, *map(str, op.qubits)]
        if op.angle is not None:
            parts.append(repr(op.angle))
        if op.cbit is not None:
            parts.append(str(op.cbit))
        if op.shape is not None:
            parts.append(op.shape)
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    """Inverse of circuit_to_text; role metadata is not carried by the
    format and comes back empty."""
    mode, n_qubits, n_cbits = "physical", 0, 0
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, val = token.split("=", 1)
                    if key == "mode":
                        mode = val
                    elif key == "qubits":
                        n_qubits = int(val)
                    elif key == "cbits":
                        n_cbits = int(val)
            continue
        tokens = line.split()
        kind = tokens[0].upper()
        if kind not in ALL_KINDS:
            raise ValueError(f"line {lineno}: unknown op {kind!r}")
        n_targets = 2 if kind in _TWO_QUBIT_KINDS else 1
        qubits = tuple(int(t) for t in tokens[1 : 1 + n_targets])
        rest = tokens[1 + n_targets :]
        angle = cbit = shape = None
        if kind == "RZ":
            angle, rest = float(rest[0]), rest[1:]
        if kind in ("MEASURE", "COND_X", "COND_Z"):
            cbit, rest = int(rest[0]), rest[1:]
        if rest:
            shape = rest[0]
        ops.append(GateOp(kind, qubits, angle=angle, cbit=cbit, shape=shape))
    n_qubits = n_qubits or (max((max(op.qubits) for op in ops), default=-1) + 1)
    meta = CircuitMeta(two_qubit_count=sum(1 for op in ops if op.is_two_qubit))
    return Circuit(n_qubits, n_cbits, ops, mode, meta)
