"""Pure-numpy state-vector kernels.

Drop-in fallback for the compiled extension: same three entry points, same
index conventions (qubit q of an n-qubit register lives at bit shift
``n - 1 - q`` of the amplitude index, i.e. qubit 0 is the most significant
bit).  All functions return fresh arrays and never mutate their inputs.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def apply_gate(state: np.ndarray, gate: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Apply a 2^k x 2^k gate to the qubits at the given bit shifts.

    ``shifts[j]`` is the amplitude-index bit carrying gate-index bit j
    (LSB numbering), so ``shifts`` runs from the gate's least to most
    significant qubit.
    """
    dim = state.shape[0]
    n = dim.bit_length() - 1
    k = len(shifts)
    # axis for bit shift s is n - 1 - s; gate bit k-1 (MSB) must come first
    axes = [n - 1 - int(shifts[j]) for j in range(k - 1, -1, -1)]
    rest = [ax for ax in range(n) if ax not in axes]
    psi = state.reshape([2] * n)
    psi = np.transpose(psi, axes + rest)
    psi = psi.reshape(1 << k, -1)
    psi = gate @ psi
    psi = psi.reshape([2] * n)
    inverse = np.argsort(axes + rest)
    return np.ascontiguousarray(np.transpose(psi, inverse)).reshape(dim)


def branch_weights(state: np.ndarray, shift: int) -> tuple[float, float]:
    """Raw probability masses of the two outcomes of one qubit.

    Both branches are summed independently (not computed as 1 - other) so
    that callers can renormalise by the true total.
    """
    dim = state.shape[0]
    n = dim.bit_length() - 1
    axis = n - 1 - shift
    probs = np.abs(state.reshape([2] * n)) ** 2
    marginal = np.moveaxis(probs, axis, 0).reshape(2, -1)
    return float(np.sum(marginal[0])), float(np.sum(marginal[1]))


def collapse_qubit(state: np.ndarray, shift: int, outcome: int, scale: float) -> np.ndarray:
    """Project one qubit onto ``outcome`` and rescale the surviving branch."""
    index = np.arange(state.shape[0])
    keep = ((index >> shift) & 1) == outcome
    out = np.where(keep, state, 0.0 + 0.0j)
    return out * scale
