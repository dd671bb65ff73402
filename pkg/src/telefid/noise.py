"""Per-gate noise channels and readout confusion built from calibration data.

Every constructor is a pure function of an immutable snapshot plus a global
noise-scale multiplier ``ns``.  ``ns`` scales 1/T1, 1/T2, the residual Pauli
rates and the readout errors uniformly (each clamped to its physical range);
ns=0 turns every channel into an exact identity, ns=1 reproduces the
calibration snapshot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from . import qsim
from .errors import EdgeNotInSnapshot, InvalidCalibration
from .qsim import KrausChannel, identity_channel

# Fallback gate durations (microseconds) when a snapshot omits them.
DEFAULT_DUR_1Q = 0.05
DEFAULT_DUR_2Q = 0.15
DEFAULT_DUR_MEAS = 1.2

GATE_CLASSES = ("sx", "cz", "measure")
PULSE_SHAPES = ("square", "gaussian_square", "drag")

# Which gate class each circuit op kind draws its noise from.  RZ and
# conditional Z are virtual frame updates: no pulse, no error.
_KIND_TO_CLASS = {
    "SX": "sx",
    "X": "sx",
    "H": "sx",
    "COND_X": "sx",
    "CX": "cz",
    "CZ": "cz",
    "MEASURE": "measure",
}
VIRTUAL_KINDS = ("RZ", "COND_Z")


@dataclass
class QubitCal:
    """Single-qubit calibration entry (times in microseconds)."""

    t1: float
    t2: float
    readout_e01: float  # P(read 1 | true 0)
    readout_e10: float  # P(read 0 | true 1)
    err_1q: float
    dur_1q: float = DEFAULT_DUR_1Q
    dur_meas: float = DEFAULT_DUR_MEAS

    def validate(self, label=""):
        if self.t1 <= 0 or self.t2 <= 0:
            raise InvalidCalibration(f"{label}: T1/T2 must be positive")
        if self.t2 > 2 * self.t1 + 1e-12:
            raise InvalidCalibration(f"{label}: t2={self.t2} exceeds 2*t1={2 * self.t1}")
        for name in ("readout_e01", "readout_e10", "err_1q"):
            p = getattr(self, name)
            if not 0 <= p <= 0.5:
                raise InvalidCalibration(f"{label}.{name}={p} outside [0, 0.5]")
        if self.dur_1q <= 0 or self.dur_meas <= 0:
            raise InvalidCalibration(f"{label}: durations must be positive")


@dataclass
class EdgeCal:
    """Two-qubit calibration entry for one coupling edge."""

    qubits: tuple
    err_2q: float
    dur_2q: float = DEFAULT_DUR_2Q

    def __post_init__(self):
        a, b = self.qubits
        if a == b:
            raise InvalidCalibration(f"edge ({a},{b}) has identical endpoints")
        self.qubits = (min(a, b), max(a, b))

    def validate(self, label=""):
        if not 0 <= self.err_2q <= 0.5:
            raise InvalidCalibration(f"{label}.err_2q={self.err_2q} outside [0, 0.5]")
        if self.dur_2q <= 0:
            raise InvalidCalibration(f"{label}: dur_2q must be positive")


@dataclass
class CalibrationSnapshot:
    backend_name: str
    timestamp: str
    qubits: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)

    def __post_init__(self):
        self._edge_map = {frozenset(e.qubits): e for e in self.edges}

    @property
    def snapshot_id(self) -> str:
        return f"{self.backend_name}@{self.timestamp}"

    def qubit(self, q: int) -> QubitCal:
        try:
            return self.qubits[q]
        except KeyError:
            raise EdgeNotInSnapshot(f"qubit {q} not in snapshot") from None

    def edge(self, a: int, b: int) -> EdgeCal:
        try:
            return self._edge_map[frozenset((a, b))]
        except KeyError:
            raise EdgeNotInSnapshot(f"edge ({a},{b}) not in snapshot") from None

    def has_edge(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self._edge_map

    def validate(self):
        for q, cal in self.qubits.items():
            cal.validate(f"qubit[{q}]")
        seen = set()
        for e in self.edges:
            key = frozenset(e.qubits)
            if key in seen:
                raise InvalidCalibration(f"duplicate edge {tuple(sorted(key))}")
            seen.add(key)
            for q in e.qubits:
                if q not in self.qubits:
                    raise InvalidCalibration(f"edge {e.qubits} references unknown qubit {q}")
            e.validate(f"edge[{tuple(e.qubits)}]")
        return self


@dataclass(frozen=True)
class ShapeFactorTable:
    """Multiplier on the residual error rate per (gate class, pulse shape).

    The defaults encode the qualitative ordering observed for superconducting
    gates: 1q rotations do best with DRAG, entangling gates with Gaussian
    Square, measurement is shape-insensitive.  They are configuration values,
    not calibrated truth; override via the JSON config file.
    """

    factor: dict = field(
        default_factory=lambda: {
            ("sx", "square"): 1.3,
            ("sx", "gaussian_square"): 1.1,
            ("sx", "drag"): 0.7,
            ("cz", "square"): 1.25,
            ("cz", "gaussian_square"): 0.8,
            ("cz", "drag"): 1.0,
            ("measure", "square"): 1.0,
            ("measure", "gaussian_square"): 1.0,
            ("measure", "drag"): 1.0,
        }
    )

    def __post_init__(self):
        for cls in GATE_CLASSES:
            for shape in PULSE_SHAPES:
                val = self.factor.get((cls, shape))
                if val is None or val <= 0:
                    raise InvalidCalibration(
                        f"shape factor ({cls}, {shape}) missing or non-positive: {val}"
                    )

    def get(self, gate_class: str, shape: str) -> float:
        return self.factor[(gate_class, shape)]


DEFAULT_SHAPE_FACTORS = ShapeFactorTable()

# Uniform residual Pauli weights; overridable through the config file.
UNIFORM_WEIGHTS_1Q = (1 / 3,) * 3
UNIFORM_WEIGHTS_2Q = (1 / 15,) * 15


def _validate_ns(ns: float) -> float:
    if ns < 0:
        raise InvalidCalibration(f"noise scale ns={ns} must be >= 0")
    return float(ns)


def thermal_relaxation_channel(t1: float, t2: float, duration: float, ns: float) -> KrausChannel:
    """Amplitude damping (gamma = 1 - e^{-ns*t/T1}) composed with pure
    dephasing so the total off-diagonal factor is e^{-ns*t/T2}."""
    ns = _validate_ns(ns)
    if t1 <= 0 or t2 <= 0 or duration <= 0:
        raise InvalidCalibration("t1, t2, duration must be positive")
    if t2 > 2 * t1 + 1e-12:
        raise InvalidCalibration(f"t2={t2} exceeds 2*t1={2 * t1}")
    if ns == 0.0:
        return identity_channel(1)
    gamma = 1.0 - math.exp(-ns * duration / t1)
    # residual dephasing beyond sqrt(1-gamma): factor e^{-ns*t*(1/T2 - 1/(2 T1))}
    rate = max(0.0, 1.0 / t2 - 0.5 / t1)
    d = math.exp(-ns * duration * rate)
    lam = 0.5 * (1.0 - d)
    ops = [
        np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex),
        np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex),
    ]
    if lam > 0.0:
        damp = KrausChannel(ops)
        deph = KrausChannel([math.sqrt(1 - lam) * qsim.I2, math.sqrt(lam) * qsim.Z])
        return qsim.compose_channels(damp, deph)
    if gamma == 0.0:
        return identity_channel(1)
    return KrausChannel(ops)


def _pauli_products(n_targets: int):
    labels = ["X", "Y", "Z"] if n_targets == 1 else [
        a + b for a, b in product("IXYZ", repeat=2) if a + b != "II"
    ]
    mats = []
    for lab in labels:
        m = np.array([[1]], dtype=complex)
        for ch in lab:
            m = np.kron(m, qsim.PAULIS_1Q[ch])
        mats.append(m)
    return mats


def residual_pauli_channel(
    gate_err: float,
    coherence_err: float,
    shape_factor: float,
    ns: float,
    n_targets: int,
    weights=None,
) -> KrausChannel:
    """Stochastic Pauli channel for gate infidelity beyond decoherence.

    The residual probability is
    p = clamp(ns * shape_factor * max(0, gate_err - coherence_err), 0, 0.75),
    spread over the non-identity Paulis by ``weights`` (uniform default).
    """
    ns = _validate_ns(ns)
    if not 0 <= gate_err <= 0.5 or not 0 <= coherence_err <= 0.5:
        raise InvalidCalibration("error rates must lie in [0, 0.5]")
    if shape_factor <= 0:
        raise InvalidCalibration(f"shape_factor={shape_factor} must be positive")
    if n_targets not in (1, 2):
        raise InvalidCalibration(f"n_targets={n_targets} must be 1 or 2")
    p = min(0.75, max(0.0, ns * shape_factor * (gate_err - coherence_err)))
    if p == 0.0:
        return identity_channel(n_targets)
    paulis = _pauli_products(n_targets)
    if weights is None:
        weights = UNIFORM_WEIGHTS_1Q if n_targets == 1 else UNIFORM_WEIGHTS_2Q
    if len(weights) != len(paulis):
        raise InvalidCalibration(
            f"weight vector length {len(weights)} != {len(paulis)} Paulis"
        )
    total = sum(weights)
    dim = 2**n_targets
    ops = [math.sqrt(1.0 - p) * np.eye(dim, dtype=complex)]
    for w, pauli in zip(weights, paulis):
        if w > 0:
            ops.append(math.sqrt(p * w / total) * pauli)
    return KrausChannel(ops)


def decoherence_fraction(duration: float, cals) -> float:
    """Share of a gate's error budget explained by thermal relaxation:
    1 - e^{-dur*(1/T1 + 1/T2)/2}, averaged over the target qubits."""
    vals = [
        1.0 - math.exp(-duration * (1.0 / c.t1 + 1.0 / c.t2) / 2.0) for c in cals
    ]
    return sum(vals) / len(vals)


def gate_channel(
    snapshot: CalibrationSnapshot,
    gate_kind: str,
    physical_qubits,
    shape: str,
    ns: float,
    factors: ShapeFactorTable = DEFAULT_SHAPE_FACTORS,
    weights_1q=None,
    weights_2q=None,
) -> KrausChannel:
    """Error channel attached to one gate: thermal relaxation on each target
    over the gate duration, composed with the shape-scaled residual Pauli
    term.

    RZ and COND_Z are virtual (zero duration, identity).  MEASURE carries
    only relaxation over the measurement duration; its readout error lives
    exclusively in the confusion matrix, so it is not double counted here.
    """
    ns = _validate_ns(ns)
    kind = gate_kind.upper()
    if kind in VIRTUAL_KINDS:
        return identity_channel(1)
    gate_class = _KIND_TO_CLASS.get(kind, kind.lower())
    if gate_class not in GATE_CLASSES:
        raise InvalidCalibration(f"unknown gate kind {gate_kind!r}")
    if shape not in PULSE_SHAPES:
        raise InvalidCalibration(f"unknown pulse shape {shape!r}")
    qubits = list(physical_qubits)
    if ns == 0.0:
        return identity_channel(2 if gate_class == "cz" else 1)

    cals = [snapshot.qubit(q) for q in qubits]
    if gate_class == "sx":
        (cal,) = cals
        return _build_1q_channel(
            cal.t1, cal.t2, cal.dur_1q, cal.err_1q,
            factors.get("sx", shape), ns, _as_key(weights_1q),
        )
    if gate_class == "measure":
        (cal,) = cals
        return _build_thermal(cal.t1, cal.t2, cal.dur_meas, ns)
    # two-qubit gate
    edge = snapshot.edge(*qubits)
    a, b = cals
    return _build_2q_channel(
        a.t1, a.t2, b.t1, b.t2, edge.dur_2q, edge.err_2q,
        factors.get("cz", shape), ns, _as_key(weights_2q),
    )


def _as_key(weights):
    return None if weights is None else tuple(weights)


# Channel construction is dominated by the Choi reductions, and identical
# calibration values recur constantly inside sweeps, so the builders below
# memoize on their value tuples.  Returned channels are shared: never mutate.


@lru_cache(maxsize=4096)
def _build_thermal(t1, t2, duration, ns):
    return thermal_relaxation_channel(t1, t2, duration, ns)


@lru_cache(maxsize=4096)
def _build_1q_channel(t1, t2, dur, err_1q, factor, ns, weights):
    thermal = thermal_relaxation_channel(t1, t2, dur, ns)
    coh = 1.0 - math.exp(-dur * (1.0 / t1 + 1.0 / t2) / 2.0)
    residual = residual_pauli_channel(err_1q, min(0.5, coh), factor, ns, 1, weights)
    return qsim.compose_channels(residual, thermal)


@lru_cache(maxsize=4096)
def _build_2q_channel(t1a, t2a, t1b, t2b, dur, err_2q, factor, ns, weights):
    thermal_2q = qsim.tensor_channels(
        thermal_relaxation_channel(t1a, t2a, dur, ns),
        thermal_relaxation_channel(t1b, t2b, dur, ns),
    )
    coh = 0.5 * (
        (1.0 - math.exp(-dur * (1.0 / t1a + 1.0 / t2a) / 2.0))
        + (1.0 - math.exp(-dur * (1.0 / t1b + 1.0 / t2b) / 2.0))
    )
    residual = residual_pauli_channel(err_2q, min(0.5, coh), factor, ns, 2, weights)
    return qsim.compose_channels(residual, thermal_2q)


def confusion(snapshot: CalibrationSnapshot, qubit: int, ns: float) -> np.ndarray:
    """Column-stochastic readout confusion matrix with errors scaled by ns
    and clamped to [0, 0.5]."""
    ns = _validate_ns(ns)
    cal = snapshot.qubit(qubit)
    e01 = min(0.5, ns * cal.readout_e01)
    e10 = min(0.5, ns * cal.readout_e10)
    return np.array([[1.0 - e01, e10], [e01, 1.0 - e10]])
