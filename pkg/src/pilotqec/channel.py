"""Polarization rotation and the time-dependent depolarizing link.

The link applies a fixed (but unknown to the receiver) rotation over a
stationary window of length ``t_crit`` and mixes the state toward I/2 with
a depolarization probability that jumps to 1 once the window is exceeded:

    output(rho) = p * I/2 + (1 - p) * U rho Udag,   p = p_depol for t <= t_crit
                                                    p = 1       for t >  t_crit

Two generator conventions for the rotation are first class:

* Z_PHASE:     U = diag(e^{i a/2}, e^{-i a/2}) -- a phase rotation.  Applied
  to (|0>+|1>)/sqrt(2) it produces the equatorial "working form" pilot the
  correction circuits consume; rotations compose additively and exactly.
* X_AMPLITUDE: U = cos(a/2) I + i sin(a/2) X -- produces the amplitude-form
  pilot cos(a/2)|0> + i sin(a/2)|1> from |0>.  One Hadamard converts between
  the two pilot forms.

The decoder-facing view is "purification mode": the receiver calculates
with the pure rotated state rather than the mixed physical output.  The
physical output stays available both as a density matrix (`apply_channel`)
and as a sampled pure state (`sample_physical_output`) so the cost of the
purification assumption can be measured.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from pilotqec import qcore
from pilotqec.qcore import DensityMatrix, PureState, UnitaryOperator


class RotationConvention(enum.Enum):
    """Generator choice for the link rotation."""

    Z_PHASE = "z_phase"
    X_AMPLITUDE = "x_amplitude"


@dataclass(frozen=True)
class ChannelParams:
    """Stationary-window description of the link.

    theta is the rotation angle accumulated over the window, p_depol the
    depolarization probability inside the window, t_crit the window length
    in seconds.
    """

    theta: float
    p_depol: float
    t_crit: float
    convention: RotationConvention = RotationConvention.Z_PHASE

    def __post_init__(self) -> None:
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if not 0.0 <= self.p_depol <= 1.0:
            raise ValueError(f"p_depol {self.p_depol} outside [0, 1]")
        if not self.t_crit > 0.0:
            raise ValueError("t_crit must be positive")

    def to_json_dict(self) -> dict:
        return {
            "theta_rad": self.theta,
            "p_depol": self.p_depol,
            "t_crit_s": self.t_crit,
            "convention": self.convention.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "ChannelParams":
        return cls(
            theta=float(data["theta_rad"]),
            p_depol=float(data["p_depol"]),
            t_crit=float(data["t_crit_s"]),
            convention=RotationConvention(data.get("convention", "z_phase")),
        )


def rotation_unitary(theta: float, convention: RotationConvention) -> UnitaryOperator:
    """One-qubit rotation by ``theta`` under the given generator convention.

    Both conventions compose additively:
    rotation(a) @ rotation(b) == rotation(a + b).
    """
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    if convention is RotationConvention.Z_PHASE:
        matrix = np.array([[c + 1j * s, 0.0], [0.0, c - 1j * s]])
    else:
        matrix = np.array([[c, 1j * s], [1j * s, c]])
    return UnitaryOperator(matrix)


def depolarization_parameter(params: ChannelParams, t: float) -> float:
    """Effective depolarization probability at elapsed time ``t``."""
    if t < 0.0:
        raise ValueError("time must be nonnegative")
    return params.p_depol if t <= params.t_crit else 1.0


def apply_channel(rho: DensityMatrix, params: ChannelParams, t: float) -> DensityMatrix:
    """Physical (mixed) output of the link acting on a one-qubit state."""
    if rho.qubits != 1:
        raise ValueError("channel acts on one-qubit states")
    p = depolarization_parameter(params, t)
    u = rotation_unitary(params.theta, params.convention).matrix
    rotated = u @ rho.entries @ u.conj().T
    return DensityMatrix(p * np.eye(2) / 2.0 + (1.0 - p) * rotated)


def ideal_output_purification(state: PureState, params: ChannelParams, t: float) -> PureState:
    """Pure rotated state the decoder calculates with (purification mode).

    Only meaningful inside the stationary window; past t_crit the physical
    output is exactly I/2 and admits no useful purification.
    """
    if state.qubits != 1:
        raise ValueError("purification mode is defined for one-qubit inputs")
    if t > params.t_crit:
        raise ValueError(f"t={t} exceeds the stationary window t_crit={params.t_crit}")
    u = rotation_unitary(params.theta, params.convention)
    return qcore.apply(u, state, [0])


def apply_channel_to_ensemble(
    prior: list[float],
    states: list[DensityMatrix],
    params: ChannelParams,
    t: float,
) -> DensityMatrix:
    """Channel output of a classical mixture sum_i prior[i] * states[i]."""
    if len(prior) != len(states) or len(prior) == 0:
        raise ValueError("prior and states must be equal-length, nonempty")
    total = float(sum(prior))
    if abs(total - 1.0) > 1e-12 or any(p < 0 for p in prior):
        raise ValueError(f"prior {prior} is not a probability distribution")
    mixture = sum(p * rho.entries for p, rho in zip(prior, states))
    return apply_channel(DensityMatrix(mixture), params, t)


def sample_physical_output(
    state: PureState, params: ChannelParams, t: float, rng: np.random.Generator
) -> PureState:
    """Draw one pure sample of the physical channel output.

    With probability p the qubit is replaced by a uniformly random
    eigenstate of I/2 (a computational basis state); otherwise it is
    rotated.  Averaging the resulting projectors reproduces apply_channel.
    """
    if state.qubits != 1:
        raise ValueError("channel acts on one-qubit states")
    p = depolarization_parameter(params, t)
    if rng.random() < p:
        return PureState.basis(1, int(rng.integers(2)))
    u = rotation_unitary(params.theta, params.convention)
    return qcore.apply(u, state, [0])


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """(x, y, z) Bloch components of a one-qubit density matrix."""
    if rho.qubits != 1:
        raise ValueError("Bloch vector is defined for one qubit")
    paulis = (qcore.PAULI_X, qcore.PAULI_Y, qcore.PAULI_Z)
    return np.array([float(np.trace(rho.entries @ p.matrix).real) for p in paulis])
