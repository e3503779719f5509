"""Dense state-vector engine for small qubit registers.

Everything the protocol circuits need: register composition, gate
application, controlled gates, projective single-qubit measurement with
exact branch probabilities, partial trace, fidelity and overlaps.  States
and operators are immutable after construction and validated against their
defining invariants, so downstream code can assume unit norm, unitarity and
proper density matrices.

Conventions
-----------
* Qubit 0 is the most significant bit of the amplitude index, i.e.
  ``tensor(a, b)`` puts ``a``'s qubits first and equals ``np.kron(a, b)``.
* Measurement returns BOTH outcome branches with their exact probabilities;
  drawing a single branch from a random source is a thin wrapper on top.
  Branch probabilities are renormalised by their float sum, which keeps the
  two-outcome completeness relation exact.
* State equality is up to global phase; circuit identities only hold there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pilotqec import _kernels

#: default cap on register width; dense amplitudes grow as 2**q
MAX_QUBITS = 12

#: constructor-level validation tolerance
ATOL_CONSTRUCT = 1e-12

#: a branch below this probability is reported as degenerate (no post state)
DEGENERATE_PROBABILITY = 1e-15


def _require_finite(array: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{what} contains non-finite entries")


def _qubit_count(dim: int, what: str) -> int:
    q = dim.bit_length() - 1
    if q < 1 or (1 << q) != dim:
        raise ValueError(f"{what} dimension {dim} is not a power of two >= 2")
    return q


class PureState:
    """Normalized complex amplitude vector over ``qubits`` qubits."""

    __slots__ = ("qubits", "amplitudes")

    def __init__(self, amplitudes: np.ndarray) -> None:
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a 1-D array")
        object.__setattr__(self, "qubits", _qubit_count(amps.shape[0], "state"))
        # NaN/Inf amplitudes poison the norm, so this also enforces finiteness
        norm_sq = float(np.vdot(amps, amps).real)
        if not abs(norm_sq - 1.0) <= ATOL_CONSTRUCT:
            raise ValueError(f"state norm^2 = {norm_sq!r}, not 1 within {ATOL_CONSTRUCT}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    @classmethod
    def from_amplitudes(cls, values) -> "PureState":
        """Build from any complex sequence, normalising it first."""
        amps = np.asarray(values, dtype=np.complex128)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalise the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis(cls, qubits: int, index: int) -> "PureState":
        """Computational basis state |index> on the given register width."""
        dim = 1 << qubits
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} out of range for {qubits} qubits")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def random(cls, qubits: int, rng: np.random.Generator) -> "PureState":
        """Haar-ish random state: normalised complex Gaussian amplitudes."""
        dim = 1 << qubits
        amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return cls.from_amplitudes(amps)

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self) -> str:
        return f"PureState(qubits={self.qubits}, amplitudes={self.amplitudes!r})"


def plus_state() -> PureState:
    """(|0> + |1>)/sqrt(2)."""
    return PureState.from_amplitudes([1.0, 1.0])


class UnitaryOperator:
    """Square complex matrix with U Udag = I within construction tolerance."""

    __slots__ = ("qubits", "matrix")

    def __init__(self, matrix: np.ndarray) -> None:
        mat = np.ascontiguousarray(matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator must be a square matrix")
        object.__setattr__(self, "qubits", _qubit_count(mat.shape[0], "operator"))
        _require_finite(mat, "operator")
        defect = np.max(np.abs(mat @ mat.conj().T - np.eye(mat.shape[0])))
        if defect > ATOL_CONSTRUCT:
            raise ValueError(f"operator is not unitary (defect {defect:.3e})")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def __setattr__(self, name, value):
        raise AttributeError("UnitaryOperator is immutable")

    def dagger(self) -> "UnitaryOperator":
        return UnitaryOperator(self.matrix.conj().T)

    def __matmul__(self, other: "UnitaryOperator") -> "UnitaryOperator":
        return UnitaryOperator(self.matrix @ other.matrix)

    def __repr__(self) -> str:
        return f"UnitaryOperator(qubits={self.qubits})"


class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-1 matrix on a qubit register."""

    __slots__ = ("qubits", "entries")

    def __init__(self, entries: np.ndarray) -> None:
        mat = np.ascontiguousarray(entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        object.__setattr__(self, "qubits", _qubit_count(mat.shape[0], "density matrix"))
        _require_finite(mat, "density matrix")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL_CONSTRUCT:
            raise ValueError("density matrix is not Hermitian")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > ATOL_CONSTRUCT:
            raise ValueError(f"density matrix trace {trace!r} is not 1")
        eigenvalues = np.linalg.eigvalsh(mat)
        if float(eigenvalues.min()) < -1e-10:
            raise ValueError(f"density matrix has negative eigenvalue {eigenvalues.min():.3e}")
        mat.flags.writeable = False
        object.__setattr__(self, "entries", mat)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @classmethod
    def maximally_mixed(cls, qubits: int) -> "DensityMatrix":
        dim = 1 << qubits
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def __repr__(self) -> str:
        return f"DensityMatrix(qubits={self.qubits})"


@dataclass(frozen=True)
class MeasurementRecord:
    """One branch of a projective single-qubit measurement.

    ``post_state`` is renormalised to unit norm; a branch whose probability
    falls below DEGENERATE_PROBABILITY carries ``degenerate=True`` and no
    post state instead of a meaningless renormalisation.
    """

    outcome: int
    probability: float
    post_state: PureState | None
    degenerate: bool = False


def tensor(a: PureState, b: PureState, max_qubits: int = MAX_QUBITS) -> PureState:
    """Register composition; a's qubits become the most significant."""
    total = a.qubits + b.qubits
    if total > max_qubits:
        raise ValueError(f"register of {total} qubits exceeds cap of {max_qubits}")
    # outer-product form of the Kronecker product; faster than np.kron here
    return PureState((a.amplitudes[:, None] * b.amplitudes[None, :]).reshape(-1))


def _target_shifts(n: int, targets: list[int]) -> np.ndarray:
    """Bit shift of gate-index bit j (LSB first) for each target qubit."""
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target qubit in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target qubit {t} out of range for {n} qubits")
    # targets[0] is the gate's most significant qubit
    return np.array([n - 1 - t for t in reversed(targets)], dtype=np.int64)


def apply(u: UnitaryOperator, s: PureState, targets: list[int]) -> PureState:
    """Apply ``u`` on the listed qubits (identity on the rest).

    ``targets[0]`` carries the most significant bit of ``u``'s index, so
    ``apply(CNOT, s, [c, t])`` treats qubit ``c`` as the control.
    """
    if u.qubits != len(targets):
        raise ValueError(f"{u.qubits}-qubit operator applied to {len(targets)} targets")
    shifts = _target_shifts(s.qubits, list(targets))
    return PureState(_kernels.apply_gate(s.amplitudes, u.matrix, shifts))


def controlled(u: UnitaryOperator, control_value: int) -> UnitaryOperator:
    """Add a control qubit (the new most significant one) to ``u``.

    The operator acts on its targets iff the control equals
    ``control_value`` and is the identity otherwise.
    """
    if control_value not in (0, 1):
        raise ValueError("control_value must be 0 or 1")
    dim = u.matrix.shape[0]
    out = np.zeros((2 * dim, 2 * dim), dtype=np.complex128)
    act = slice(dim, 2 * dim) if control_value == 1 else slice(0, dim)
    idle = slice(0, dim) if control_value == 1 else slice(dim, 2 * dim)
    out[act, act] = u.matrix
    out[idle, idle] = np.eye(dim)
    return UnitaryOperator(out)


def measure(s: PureState, qubit: int) -> tuple[MeasurementRecord, MeasurementRecord]:
    """Projective measurement of one qubit in the computational basis.

    Returns both branches.  Probabilities are the two raw branch masses
    divided by their sum, so they add to exactly 1; post states are
    renormalised by their own raw mass.
    """
    if not 0 <= qubit < s.qubits:
        raise ValueError(f"qubit {qubit} out of range for {s.qubits}-qubit state")
    shift = s.qubits - 1 - qubit
    w0, w1 = _kernels.branch_weights(s.amplitudes, shift)
    total = w0 + w1
    records = []
    for outcome, weight in ((0, w0), (1, w1)):
        probability = weight / total
        if probability < DEGENERATE_PROBABILITY:
            records.append(MeasurementRecord(outcome, probability, None, degenerate=True))
        else:
            post = _kernels.collapse_qubit(s.amplitudes, shift, outcome, 1.0 / np.sqrt(weight))
            records.append(MeasurementRecord(outcome, probability, PureState(post)))
    return records[0], records[1]


def sample_measure(s: PureState, qubit: int, rng: np.random.Generator) -> MeasurementRecord:
    """Draw one measurement branch; only the drawn branch is collapsed."""
    if not 0 <= qubit < s.qubits:
        raise ValueError(f"qubit {qubit} out of range for {s.qubits}-qubit state")
    shift = s.qubits - 1 - qubit
    w0, w1 = _kernels.branch_weights(s.amplitudes, shift)
    total = w0 + w1
    p0 = w0 / total
    outcome, probability, weight = (0, p0, w0) if rng.random() < p0 else (1, w1 / total, w1)
    if probability < DEGENERATE_PROBABILITY:
        return MeasurementRecord(outcome, probability, None, degenerate=True)
    post = _kernels.collapse_qubit(s.amplitudes, shift, outcome, 1.0 / np.sqrt(weight))
    return MeasurementRecord(outcome, probability, PureState(post))


def factor_out(s: PureState, qubit: int, outcome: int) -> PureState:
    """Drop a qubit known to be in basis state ``outcome``.

    Used after measurement collapse, where the register is an exact product
    of the remaining qubits with |outcome> on the measured wire.
    """
    shift = s.qubits - 1 - qubit
    sub = s.amplitudes.reshape(-1, 2, 1 << shift)[:, outcome, :]
    return PureState(sub.reshape(-1))


def partial_trace(rho: DensityMatrix, keep: list[int]) -> DensityMatrix:
    """Reduced density matrix on the kept qubits, in the order given."""
    if len(keep) == 0:
        raise ValueError("keep list must be nonempty")
    n = rho.qubits
    if len(set(keep)) != len(keep) or any(not 0 <= q < n for q in keep):
        raise ValueError(f"invalid keep list {keep} for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    tensor_form = rho.entries.reshape([2] * (2 * n))
    for q in sorted(traced, reverse=True):
        half = tensor_form.ndim // 2
        tensor_form = np.trace(tensor_form, axis1=q, axis2=half + q)
    # remaining qubits are in ascending order; permute to requested order
    remaining = sorted(keep)
    order = [remaining.index(q) for q in keep]
    m = len(keep)
    tensor_form = np.transpose(tensor_form, order + [m + i for i in order])
    return DensityMatrix(tensor_form.reshape(1 << m, 1 << m))


def fidelity(psi: PureState, rho: DensityMatrix) -> float:
    """<psi| rho |psi>, checked to be real."""
    if psi.qubits != rho.qubits:
        raise ValueError("state and density matrix dimensions differ")
    value = complex(psi.amplitudes.conj() @ rho.entries @ psi.amplitudes)
    if abs(value.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {value.imag:.3e}")
    return min(max(value.real, 0.0), 1.0)


def overlap(a: PureState, b: PureState) -> complex:
    """Inner product <a|b>."""
    if a.qubits != b.qubits:
        raise ValueError("states have different dimensions")
    return complex(a.amplitudes.conj() @ b.amplitudes)


def equal_up_to_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    """True when |<a|b>| = 1 within ``tol`` (global phase ignored)."""
    return abs(abs(overlap(a, b)) - 1.0) <= tol


def _gate(rows) -> UnitaryOperator:
    return UnitaryOperator(np.array(rows, dtype=np.complex128))


IDENTITY = _gate([[1, 0], [0, 1]])
PAULI_X = _gate([[0, 1], [1, 0]])
PAULI_Y = _gate([[0, -1j], [1j, 0]])
PAULI_Z = _gate([[1, 0], [0, -1]])
HADAMARD = _gate(np.array([[1, 1], [1, -1]]) / np.sqrt(2.0))
SWAP = _gate([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
