import pytest

from telefid.noise import CalibrationSnapshot, EdgeCal, QubitCal


def make_snapshot(n_qubits=3, edges=((0, 1), (1, 2)), **overrides):
    """Small hand-built snapshot for unit tests; overrides patch every qubit."""
    qdefaults = dict(
        t1=100.0,
        t2=120.0,
        readout_e01=0.02,
        readout_e10=0.03,
        err_1q=0.001,
        dur_1q=0.05,
        dur_meas=1.2,
    )
    qdefaults.update({k: v for k, v in overrides.items() if k in qdefaults})
    err_2q = overrides.get("err_2q", 0.008)
    dur_2q = overrides.get("dur_2q", 0.15)
    snap = CalibrationSnapshot(
        backend_name="test-backend",
        timestamp="t0",
        qubits={q: QubitCal(**qdefaults) for q in range(n_qubits)},
        edges=[EdgeCal(qubits=e, err_2q=err_2q, dur_2q=dur_2q) for e in edges],
    )
    return snap.validate()


@pytest.fixture
def line3_snapshot():
    return make_snapshot()
