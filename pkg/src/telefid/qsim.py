"""Dense density-matrix simulation engine for up to six qubits.

Tensor convention (fixed for the whole package): qubit 0 is the MOST
significant bit of the computational-basis index.  A basis state
|b0 b1 ... b_{n-1}> therefore has index b0*2^(n-1) + ... + b_{n-1}, and a
product operator acting on qubits (0, 1, ...) is ``kron(op0, op1, ...)``
in that order.  All embeddings, projectors and partial traces in this
module derive from this single rule.

All operations are pure: they take states/channels in and return new
values, never mutating their inputs.  States stay small (dim <= 64), so
everything is dense complex128.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    InvalidConfusion,
    InvalidDimension,
    InvalidTargets,
    NonUnitary,
    NotCPTP,
)

MAX_QUBITS = 6

# Algebraic identities are checked to 1e-12; accumulated multi-op results
# to 1e-10 (headroom for 64x64 double precision).
ATOL_ALGEBRA = 1e-12
ATOL_ACCUM = 1e-10

# ---------------------------------------------------------------------------
# Fixed gate matrices

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)

PAULIS_1Q = {"I": I2, "X": X, "Y": Y, "Z": Z}


def rz(angle: float) -> np.ndarray:
    """Z rotation, diag(e^{-ia/2}, e^{+ia/2})."""
    return np.array(
        [[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex
    )


def ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class StatePrep:
    """Bloch angles of the single-qubit input state
    cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.

    theta must lie in [0, pi]; phi is normalized into [0, 2*pi).
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi + 1e-12:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        object.__setattr__(self, "phi", self.phi % (2 * math.pi))

    def ket(self) -> np.ndarray:
        return np.array(
            [
                math.cos(self.theta / 2),
                np.exp(1j * self.phi) * math.sin(self.theta / 2),
            ],
            dtype=complex,
        )


@dataclass
class DensityMatrix:
    """Mixed state of ``n_qubits`` qubits as a dense 2^n x 2^n matrix."""

    n_qubits: int
    data: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidDimension(
                f"n_qubits={self.n_qubits} outside 1..{MAX_QUBITS}"
            )
        dim = 2**self.n_qubits
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (dim, dim):
            raise InvalidDimension(
                f"data shape {self.data.shape} != ({dim}, {dim})"
            )

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.data - self.data.conj().T).max())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.data).min())


@dataclass
class KrausChannel:
    """A CPTP map given by operators {K_i} with sum K_i^† K_i = I.

    Treated as immutable after construction (the completeness defect is
    computed once and cached)."""

    operators: list = field(default_factory=list)

    def __post_init__(self):
        ops = [np.asarray(k, dtype=complex) for k in self.operators]
        if not ops:
            raise NotCPTP("channel has no Kraus operators")
        dim = ops[0].shape[0]
        if dim not in (2, 4) or any(k.shape != (dim, dim) for k in ops):
            raise NotCPTP(
                f"operators must all be 2x2 or 4x4, got {[k.shape for k in ops]}"
            )
        self.operators = ops
        acc = sum(k.conj().T @ k for k in ops)
        self._defect = float(np.abs(acc - np.eye(dim)).max())

    @property
    def n_qubits(self) -> int:
        return 1 if self.operators[0].shape[0] == 2 else 2

    def completeness_defect(self) -> float:
        return self._defect

    def is_identity(self, atol: float = 1e-15) -> bool:
        dim = self.operators[0].shape[0]
        return len(self.operators) == 1 and bool(
            np.allclose(self.operators[0], np.eye(dim), atol=atol, rtol=0)
        )


def identity_channel(n_qubits: int = 1) -> KrausChannel:
    return KrausChannel([np.eye(2**n_qubits, dtype=complex)])


def compose_channels(first: KrausChannel, second: KrausChannel) -> KrausChannel:
    """Channel applying ``first`` then ``second`` (operators {B_j A_i}),
    reduced to a minimal Kraus set via the Choi eigendecomposition."""
    ops = [b @ a for a in first.operators for b in second.operators]
    return _minimal_kraus(ops)


def tensor_channels(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Independent channels on two adjacent qubits, a on the more
    significant one."""
    ops = [np.kron(ka, kb) for ka in a.operators for kb in b.operators]
    return _minimal_kraus(ops)


def _minimal_kraus(ops: list) -> KrausChannel:
    """Collapse a redundant Kraus list to at most dim^2 operators."""
    dim = ops[0].shape[0]
    choi = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in ops:
        v = k.reshape(-1)
        choi += np.outer(v, v.conj())
    vals, vecs = np.linalg.eigh(choi)
    kept = []
    for lam, vec in zip(vals, vecs.T):
        if lam > 1e-14:
            kept.append(math.sqrt(lam) * vec.reshape(dim, dim))
    if not kept:
        kept = [np.zeros((dim, dim), dtype=complex)]
    return KrausChannel(kept)


# ---------------------------------------------------------------------------
# Internal tensor plumbing


def _check_targets(targets, n_qubits, arity=None):
    targets = list(targets)
    if arity is not None and len(targets) not in arity:
        raise InvalidTargets(f"expected {arity} targets, got {targets}")
    if len(set(targets)) != len(targets):
        raise InvalidTargets(f"duplicate targets {targets}")
    if any(not 0 <= t < n_qubits for t in targets):
        raise InvalidTargets(f"targets {targets} out of range for n={n_qubits}")
    return targets


@lru_cache(maxsize=4096)
def _embedded_cached(mat_bytes: bytes, k: int, targets: tuple, n: int) -> np.ndarray:
    """Full 2^n operator for a 2^k matrix on ``targets``: kron with identity
    in (targets, rest) factor order, then a basis-index gather back into the
    standard qubit order."""
    dim_k = 2**k
    mat = np.frombuffer(mat_bytes, dtype=complex).reshape(dim_k, dim_k)
    rest = [q for q in range(n) if q not in targets]
    perm = list(targets) + rest
    full = np.kron(mat, np.eye(2 ** (n - k), dtype=complex))
    idx = np.arange(2**n)
    gather = np.zeros(2**n, dtype=np.int64)
    for j, q in enumerate(perm):
        gather |= ((idx >> (n - 1 - q)) & 1) << (n - 1 - j)
    out = full[np.ix_(gather, gather)]
    out.flags.writeable = False
    return out


def _embed(mat: np.ndarray, targets, n: int) -> np.ndarray:
    mat = np.ascontiguousarray(mat, dtype=complex)
    return _embedded_cached(mat.tobytes(), len(targets), tuple(targets), n)


def _apply_matrix_pair(rho: np.ndarray, n: int, left: np.ndarray, targets) -> np.ndarray:
    """Compute L rho L^† with L acting only on ``targets``."""
    full = _embed(left, targets, n)
    return full @ rho @ full.conj().T


def _bit_mask(n: int, qubit: int, value: int) -> np.ndarray:
    idx = np.arange(2**n)
    return ((idx >> (n - 1 - qubit)) & 1) == value


# ---------------------------------------------------------------------------
# Engine operations


def init_state(n_qubits: int, prep: StatePrep, prep_qubit: int = 0) -> DensityMatrix:
    """All qubits in |0> except ``prep_qubit``, which carries
    Rz(phi) Ry(theta) |0> (Ry applied first)."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidDimension(f"n_qubits={n_qubits} outside 1..{MAX_QUBITS}")
    if not 0 <= prep_qubit < n_qubits:
        raise InvalidTargets(f"prep_qubit={prep_qubit} out of range")
    psi = rz(prep.phi) @ ry(prep.theta) @ np.array([1, 0], dtype=complex)
    vec = np.array([1], dtype=complex)
    for q in range(n_qubits):
        vec = np.kron(vec, psi if q == prep_qubit else np.array([1, 0], dtype=complex))
    return DensityMatrix(n_qubits, np.outer(vec, vec.conj()))


def apply_unitary(rho: DensityMatrix, u: np.ndarray, targets) -> DensityMatrix:
    """rho -> U rho U^† with U embedded on ``targets``."""
    targets = _check_targets(targets, rho.n_qubits, arity=(1, 2))
    u = np.asarray(u, dtype=complex)
    dim = 2 ** len(targets)
    if u.shape != (dim, dim):
        raise InvalidTargets(f"matrix shape {u.shape} does not match {len(targets)} targets")
    defect = np.abs(u.conj().T @ u - np.eye(dim)).max()
    if defect > ATOL_ALGEBRA:
        raise NonUnitary(f"U^†U deviates from identity by {defect:.2e}")
    return DensityMatrix(rho.n_qubits, _apply_matrix_pair(rho.data, rho.n_qubits, u, targets))


def apply_channel(rho: DensityMatrix, ch: KrausChannel, targets) -> DensityMatrix:
    """rho -> sum_i K_i rho K_i^† with the channel embedded on ``targets``."""
    targets = _check_targets(targets, rho.n_qubits, arity=(1, 2))
    if ch.n_qubits != len(targets):
        raise InvalidTargets(
            f"{ch.n_qubits}-qubit channel applied to {len(targets)} targets"
        )
    defect = ch.completeness_defect()
    if defect > ATOL_ALGEBRA:
        raise NotCPTP(f"Kraus completeness defect {defect:.2e}")
    out = np.zeros_like(rho.data)
    for k in ch.operators:
        out += _apply_matrix_pair(rho.data, rho.n_qubits, k, targets)
    return DensityMatrix(rho.n_qubits, out)


def measure_instrument(rho: DensityMatrix, qubit: int, confusion: np.ndarray):
    """Projective Z measurement of one qubit filtered through a readout
    confusion matrix.

    Returns two branches ``(recorded_bit, probability, post_state)`` keyed
    by the recorded (possibly misread) bit.  The measured qubit is left
    projected in the computational basis, not traced out.  Probabilities
    sum to 1; a branch with probability ~0 carries ``post_state=None``.
    """
    (qubit,) = _check_targets([qubit], rho.n_qubits, arity=(1,))
    conf = np.asarray(confusion, dtype=float)
    if conf.shape != (2, 2) or conf.min() < -1e-12 or conf.max() > 1 + 1e-12:
        raise InvalidConfusion(f"entries outside [0,1]: {conf}")
    col_sums = conf.sum(axis=0)
    if np.abs(col_sums - 1.0).max() > 1e-9:
        raise InvalidConfusion(f"columns must sum to 1, got {col_sums}")

    projected = {}
    probs_true = {}
    for true_bit in (0, 1):
        mask = _bit_mask(rho.n_qubits, qubit, true_bit).astype(float)
        proj = rho.data * mask[:, None] * mask[None, :]
        projected[true_bit] = proj
        probs_true[true_bit] = float(np.trace(proj).real)

    branches = []
    for recorded in (0, 1):
        prob = sum(conf[recorded, t] * probs_true[t] for t in (0, 1))
        if prob > 1e-15:
            mix = sum(conf[recorded, t] * projected[t] for t in (0, 1))
            post = DensityMatrix(rho.n_qubits, mix / prob)
        else:
            post = None
        branches.append((recorded, prob, post))
    return branches


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state on ``keep``; output qubit j is keep[j]."""
    keep = list(keep)
    if not keep:
        raise InvalidTargets("keep must be non-empty")
    _check_targets(keep, rho.n_qubits)
    n = rho.n_qubits
    t = rho.data.reshape((2,) * (2 * n))
    remaining = n
    for q in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=q, axis2=q + remaining)
        remaining -= 1
    # surviving axes are in ascending qubit order; reorder to follow `keep`
    ordered = sorted(keep)
    perm = [ordered.index(q) for q in keep]
    t = np.transpose(t, perm + [p + remaining for p in perm])
    dim = 2**remaining
    return DensityMatrix(remaining, t.reshape(dim, dim))


def fidelity(rho: DensityMatrix, prep: StatePrep) -> float:
    """State fidelity <psi(theta,phi)| rho |psi(theta,phi)> of a one-qubit
    state against the intended pure state, clamped to [0, 1]."""
    if rho.n_qubits != 1:
        raise InvalidDimension(f"fidelity needs a 1-qubit state, got {rho.n_qubits}")
    psi = prep.ket()
    val = psi.conj() @ rho.data @ psi
    return float(min(1.0, max(0.0, val.real)))
