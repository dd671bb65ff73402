"""Calibration snapshot ingestion, synthetic snapshot generation, config
loading, and CSV result persistence.

Snapshot schema (version 1, JSON):

    {
      "version": 1,
      "backend": "...", "timestamp": "...",
      "qubits": [{"index": 0, "t1_us": 100.0, "t2_us": 80.0,
                  "readout_e01": 0.02, "readout_e10": 0.03,
                  "err_1q": 0.001, "dur_1q_us": 0.05, "dur_meas_us": 1.2}, ...],
      "edges":  [{"a": 0, "b": 1, "err_2q": 0.008, "dur_2q_us": 0.15}, ...]
    }

Unknown fields are ignored; missing durations take the module defaults.
Snapshots with t2 > 2*t1 are clamped to 2*t1 at load time with a warning.
"""

from __future__ import annotations

import csv
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidCalibration, MalformedSnapshot
from .noise import (
    DEFAULT_DUR_1Q,
    DEFAULT_DUR_2Q,
    DEFAULT_DUR_MEAS,
    CalibrationSnapshot,
    EdgeCal,
    QubitCal,
    ShapeFactorTable,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _clamp_t2(qubits: dict, origin: str):
    for q, cal in qubits.items():
        if cal.t2 > 2 * cal.t1:
            warnings.warn(
                f"{origin}: qubit {q} has t2={cal.t2} > 2*t1={2 * cal.t1}; clamping",
                stacklevel=3,
            )
            cal.t2 = 2 * cal.t1
    return qubits


def snapshot_from_dict(doc: dict, origin: str = "<snapshot>") -> CalibrationSnapshot:
    try:
        qubits = {}
        for entry in doc["qubits"]:
            idx = int(entry["index"])
            if idx in qubits:
                raise InvalidCalibration(f"qubits[{idx}]: duplicate index")
            qubits[idx] = QubitCal(
                t1=float(entry["t1_us"]),
                t2=float(entry["t2_us"]),
                readout_e01=float(entry["readout_e01"]),
                readout_e10=float(entry["readout_e10"]),
                err_1q=float(entry["err_1q"]),
                dur_1q=float(entry.get("dur_1q_us", DEFAULT_DUR_1Q)),
                dur_meas=float(entry.get("dur_meas_us", DEFAULT_DUR_MEAS)),
            )
        edges = [
            EdgeCal(
                qubits=(int(e["a"]), int(e["b"])),
                err_2q=float(e["err_2q"]),
                dur_2q=float(e.get("dur_2q_us", DEFAULT_DUR_2Q)),
            )
            for e in doc["edges"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedSnapshot(f"{origin}: {exc}") from exc
    snap = CalibrationSnapshot(
        backend_name=str(doc.get("backend", "unknown")),
        timestamp=str(doc.get("timestamp", "unknown")),
        qubits=_clamp_t2(qubits, origin),
        edges=edges,
    )
    return snap.validate()


def load_snapshot(path) -> CalibrationSnapshot:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MalformedSnapshot(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedSnapshot(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise MalformedSnapshot(f"{path}: top level must be an object")
    return snapshot_from_dict(doc, origin=str(path))


def snapshot_to_dict(snap: CalibrationSnapshot) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "backend": snap.backend_name,
        "timestamp": snap.timestamp,
        "qubits": [
            {
                "index": q,
                "t1_us": cal.t1,
                "t2_us": cal.t2,
                "readout_e01": cal.readout_e01,
                "readout_e10": cal.readout_e10,
                "err_1q": cal.err_1q,
                "dur_1q_us": cal.dur_1q,
                "dur_meas_us": cal.dur_meas,
            }
            for q, cal in sorted(snap.qubits.items())
        ],
        "edges": [
            {"a": e.qubits[0], "b": e.qubits[1], "err_2q": e.err_2q, "dur_2q_us": e.dur_2q}
            for e in snap.edges
        ],
    }


def write_snapshot(snap: CalibrationSnapshot, path):
    with open(path, "w") as fh:
        json.dump(snapshot_to_dict(snap), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Synthetic snapshots


@dataclass
class SynthProfile:
    """Recipe for a deterministic synthetic snapshot.

    topology: "line", "ring" (dims=(n,)) or "grid" (dims=(rows, cols)).
    regime: "t1_dominated" (T2 near its 2*T1 ceiling, short T1),
            "dephasing_dominated" (T2 << T1), or "balanced".
    """

    topology: str = "line"
    dims: tuple = (4,)
    regime: str = "balanced"
    seed: int = 0
    base_t1: float = None  # regime default when None
    base_err_1q: float = 4e-4
    base_err_2q: float = 5e-3
    base_readout: float = 0.015

    _REGIMES = ("t1_dominated", "dephasing_dominated", "balanced")

    def __post_init__(self):
        if self.topology not in ("line", "grid", "ring"):
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.regime not in self._REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        self.dims = tuple(int(d) for d in self.dims)
        expect = 2 if self.topology == "grid" else 1
        if len(self.dims) != expect or any(d < 2 for d in self.dims):
            raise ValueError(f"dims {self.dims} invalid for {self.topology}")


def _topology_edges(profile: SynthProfile):
    if profile.topology == "line":
        (n,) = profile.dims
        return n, [(i, i + 1) for i in range(n - 1)]
    if profile.topology == "ring":
        (n,) = profile.dims
        return n, [(i, (i + 1) % n) for i in range(n)]
    rows, cols = profile.dims
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((r * cols + c, r * cols + c + 1))
            if r + 1 < rows:
                edges.append((r * cols + c, (r + 1) * cols + c))
    return rows * cols, edges


def synth_snapshot(profile: SynthProfile) -> CalibrationSnapshot:
    """Deterministic snapshot for property tests; same profile -> identical
    snapshot, and the output passes every CalibrationSnapshot invariant."""
    rng = np.random.default_rng(profile.seed)
    n, edges = _topology_edges(profile)
    regime_t1 = {"t1_dominated": 60.0, "dephasing_dominated": 200.0, "balanced": 120.0}
    base_t1 = profile.base_t1 or regime_t1[profile.regime]

    qubits = {}
    for q in range(n):
        t1 = base_t1 * float(rng.uniform(0.8, 1.2))
        if profile.regime == "t1_dominated":
            t2 = t1 * float(rng.uniform(1.7, 1.95))
        elif profile.regime == "dephasing_dominated":
            t2 = t1 * float(rng.uniform(0.08, 0.18))
        else:
            t2 = t1 * float(rng.uniform(0.7, 1.2))
        qubits[q] = QubitCal(
            t1=t1,
            t2=min(t2, 2 * t1),
            readout_e01=min(0.5, profile.base_readout * float(rng.uniform(0.5, 1.5))),
            readout_e10=min(0.5, 1.4 * profile.base_readout * float(rng.uniform(0.5, 1.5))),
            err_1q=min(0.5, profile.base_err_1q * float(rng.uniform(0.5, 1.5))),
        )
    edge_cals = [
        EdgeCal(qubits=e, err_2q=min(0.5, profile.base_err_2q * float(rng.uniform(0.5, 1.6))))
        for e in edges
    ]
    snap = CalibrationSnapshot(
        backend_name=f"synthetic-{profile.topology}-{profile.regime}",
        timestamp=f"seed-{profile.seed}",
        qubits=qubits,
        edges=edge_cals,
    )
    return snap.validate()


# ---------------------------------------------------------------------------
# Result rows (CSV schema shared with the pipeline module)

RESULT_COLUMNS = (
    "mode",
    "theta",
    "phi",
    "layout",
    "pulse_sx",
    "pulse_cz",
    "pulse_meas",
    "ns",
    "fidelity",
    "accept",
)

_FLOAT_COLUMNS = ("theta", "phi", "ns", "fidelity", "accept")


@dataclass
class RunRecord:
    """One pipeline run in the canonical CSV schema."""

    mode: str
    theta: float
    phi: float
    layout: str
    pulse_sx: str
    pulse_cz: str
    pulse_meas: str
    ns: float
    fidelity: float
    accept: float


def write_results(rows, path):
    """Canonical CSV: fixed column order, '.' decimals, LF line endings.
    Floats are written with repr so a read-back is value-identical."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULT_COLUMNS)
            for row in rows:
                writer.writerow(
                    [
                        repr(getattr(row, col)) if col in _FLOAT_COLUMNS else getattr(row, col)
                        for col in RESULT_COLUMNS
                    ]
                )
    except OSError as exc:
        raise MalformedSnapshot(f"{path}: {exc}") from exc


def read_results(path):
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = []
            for rec in reader:
                kwargs = {
                    col: float(rec[col]) if col in _FLOAT_COLUMNS else rec[col]
                    for col in RESULT_COLUMNS
                }
                rows.append(RunRecord(**kwargs))
            return rows
    except OSError as exc:
        raise MalformedSnapshot(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Config file (shape factors, durations, Pauli weights)


@dataclass
class EngineConfig:
    shape_factors: ShapeFactorTable = field(default_factory=ShapeFactorTable)
    dur_1q: float = DEFAULT_DUR_1Q
    dur_2q: float = DEFAULT_DUR_2Q
    dur_meas: float = DEFAULT_DUR_MEAS
    pauli_weights_1q: tuple = None
    pauli_weights_2q: tuple = None


def load_config(path) -> EngineConfig:
    """JSON config: {"shape_factors": {"sx": {"square": 1.3, ...}, ...},
    "durations": {"dur_1q_us": ..., ...}, "pauli_weights_1q": [...], ...}."""
    with open(path) as fh:
        doc = json.load(fh)
    cfg = EngineConfig()
    if "shape_factors" in doc:
        table = dict(ShapeFactorTable().factor)
        for cls, shapes in doc["shape_factors"].items():
            for shape, val in shapes.items():
                table[(cls, shape)] = float(val)
        cfg.shape_factors = ShapeFactorTable(table)
    durations = doc.get("durations", {})
    cfg.dur_1q = float(durations.get("dur_1q_us", cfg.dur_1q))
    cfg.dur_2q = float(durations.get("dur_2q_us", cfg.dur_2q))
    cfg.dur_meas = float(durations.get("dur_meas_us", cfg.dur_meas))
    if "pauli_weights_1q" in doc:
        cfg.pauli_weights_1q = tuple(float(w) for w in doc["pauli_weights_1q"])
    if "pauli_weights_2q" in doc:
        cfg.pauli_weights_2q = tuple(float(w) for w in doc["pauli_weights_2q"])
    return cfg


# ---------------------------------------------------------------------------
# Best-effort converter for third-party calibration dumps


_T1_KEYS = ("t1_us", "T1", "t1")
_T2_KEYS = ("t2_us", "T2", "t2")
_E01_KEYS = ("readout_e01", "prob_meas1_prep0", "e01")
_E10_KEYS = ("readout_e10", "prob_meas0_prep1", "e10")
_E1Q_KEYS = ("err_1q", "gate_error_1q", "sx_error", "error_1q")
_E2Q_KEYS = ("err_2q", "gate_error_2q", "cz_error", "ecr_error", "error_2q")


def _pick(entry: dict, keys, scale=1.0):
    for key in keys:
        if key in entry:
            return float(entry[key]) * scale, key
    return None, None


def convert_snapshot(doc: dict, origin: str = "<convert>") -> CalibrationSnapshot:
    """Map a foreign calibration document onto the version-1 schema.

    Recognizes a handful of common field spellings; anything unmapped is
    logged and skipped.  Times tagged in seconds (values < 0.01) are
    converted to microseconds.
    """
    if "qubits" not in doc or "edges" not in doc:
        raise MalformedSnapshot(f"{origin}: expected 'qubits' and 'edges' arrays")
    qubits = {}
    unmapped = set()
    for i, entry in enumerate(doc["qubits"]):
        idx = int(entry.get("index", i))
        t1, k1 = _pick(entry, _T1_KEYS)
        t2, k2 = _pick(entry, _T2_KEYS)
        if t1 is None or t2 is None:
            raise MalformedSnapshot(f"{origin}: qubit {idx} missing T1/T2")
        if t1 < 0.01:  # seconds, not microseconds
            t1, t2 = t1 * 1e6, t2 * 1e6
        e01, _ = _pick(entry, _E01_KEYS)
        e10, _ = _pick(entry, _E10_KEYS)
        e1q, _ = _pick(entry, _E1Q_KEYS)
        known = set(_T1_KEYS + _T2_KEYS + _E01_KEYS + _E10_KEYS + _E1Q_KEYS) | {
            "index",
            "dur_1q_us",
            "dur_meas_us",
        }
        unmapped.update(set(entry) - known)
        qubits[idx] = QubitCal(
            t1=t1,
            t2=min(t2, 2 * t1),
            readout_e01=min(0.5, e01 or 0.0),
            readout_e10=min(0.5, e10 or 0.0),
            err_1q=min(0.5, e1q or 0.0),
            dur_1q=float(entry.get("dur_1q_us", DEFAULT_DUR_1Q)),
            dur_meas=float(entry.get("dur_meas_us", DEFAULT_DUR_MEAS)),
        )
    edges = []
    for e in doc["edges"]:
        if "a" in e and "b" in e:
            a, b = int(e["a"]), int(e["b"])
        elif "qubits" in e:
            a, b = (int(x) for x in e["qubits"])
        else:
            raise MalformedSnapshot(f"{origin}: edge entry without endpoints: {e}")
        err, _ = _pick(e, _E2Q_KEYS)
        known = set(_E2Q_KEYS) | {"a", "b", "qubits", "dur_2q_us"}
        unmapped.update(set(e) - known)
        edges.append(
            EdgeCal(
                qubits=(a, b),
                err_2q=min(0.5, err or 0.0),
                dur_2q=float(e.get("dur_2q_us", DEFAULT_DUR_2Q)),
            )
        )
    if unmapped:
        logger.warning("%s: unmapped fields ignored: %s", origin, sorted(unmapped))
    snap = CalibrationSnapshot(
        backend_name=str(doc.get("backend", doc.get("backend_name", "converted"))),
        timestamp=str(doc.get("timestamp", doc.get("last_update_date", "unknown"))),
        qubits=qubits,
        edges=edges,
    )
    return snap.validate()
