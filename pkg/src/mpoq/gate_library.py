"""Canonical 2x2 gate matrices and their lifts to low-rank operators.

Single-qubit gates lift to rank-1 operator chains; (multi-)controlled
gates to rank-2 chains built from the projector pair ``CONTROL_0``,
``CONTROL_1`` regardless of where the control and target qubits sit in
the register.  Qubit positions are 1-based everywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor_core import MPO

IDENTITY = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
CONTROL_1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=np.complex128)
CONTROL_0 = IDENTITY - CONTROL_1

for _m in (IDENTITY, PAULI_X, HADAMARD, CONTROL_0, CONTROL_1):
    _m.flags.writeable = False


def phase_shift(phi: float) -> np.ndarray:
    """Phase-shift gate diag(1, e^{i phi})."""
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * phi)]], dtype=np.complex128)


def phase_shift_k(k: int, *, inverse: bool = False) -> np.ndarray:
    """Dyadic phase gate diag(1, e^{2 pi i / 2^k}); conjugated when inverse."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sign = -1.0 if inverse else 1.0
    return phase_shift(sign * 2.0 * np.pi / 2 ** k)


def single_qubit_gate(name: str, *, phi: float | None = None, k: int | None = None) -> np.ndarray:
    """Resolve a gate name from the circuit schema to its 2x2 matrix."""
    key = name.strip().lower()
    if key == "h":
        return HADAMARD
    if key == "x":
        return PAULI_X
    if key == "phase":
        if phi is None:
            raise ValueError("gate 'phase' needs parameter phi")
        return phase_shift(phi)
    if key == "rk":
        if k is None:
            raise ValueError("gate 'rk' needs parameter k")
        return phase_shift_k(k)
    raise ValueError(f"unknown single-qubit gate {name!r}")


@dataclass(frozen=True)
class GatePlacement:
    """A 2x2 gate placed on a register: target qubit plus optional controls."""

    matrix: np.ndarray
    target: int
    controls: tuple[int, ...] = field(default_factory=tuple)
    name: str = ""

    def __post_init__(self) -> None:
        positions = (self.target, *self.controls)
        if len(set(positions)) != len(positions):
            raise ValueError(f"overlapping gate positions {positions}")

    def to_mpo(self, n: int) -> MPO:
        if self.controls:
            return controlled_mpo(self.controls, self.matrix, self.target, n)
        return single_qubit_mpo(self.matrix, self.target, n)


def _check_positions(positions, n: int) -> None:
    for p in positions:
        if not 1 <= p <= n:
            raise ValueError(f"qubit position {p} outside register [1, {n}]")
    if len(set(positions)) != len(positions):
        raise ValueError(f"overlapping qubit positions {tuple(positions)}")


def single_qubit_mpo(matrix: np.ndarray, position: int, n: int) -> MPO:
    """Rank-1 operator applying ``matrix`` at ``position``, identity elsewhere."""
    _check_positions([position], n)
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (2, 2):
        raise ValueError("single-qubit gate must be 2x2")
    cores = []
    for q in range(1, n + 1):
        m = matrix if q == position else IDENTITY
        cores.append(m[None, :, :, None])
    return MPO(cores)


def controlled_mpo(controls, matrix: np.ndarray, target: int, n: int) -> MPO:
    """Rank-2 operator for a (multi-)controlled gate at arbitrary positions.

    Realizes ``I + C x ... x C x (A - I)`` with projectors on the control
    qubits; the bond rank is 2 exactly between the outermost involved
    qubits and 1 elsewhere, for any ordering of controls and target.
    """
    controls = tuple(controls)
    if not controls:
        raise ValueError("controlled gate needs at least one control qubit")
    _check_positions([*controls, target], n)
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (2, 2):
        raise ValueError("target gate must be 2x2")
    involved = {q: CONTROL_1 for q in controls}
    involved[target] = matrix - IDENTITY
    lo, hi = min(involved), max(involved)
    cores = []
    for q in range(1, n + 1):
        if q < lo or q > hi:
            cores.append(IDENTITY[None, :, :, None])
        elif q == lo:
            core = np.zeros((1, 2, 2, 2), dtype=np.complex128)
            core[0, :, :, 0] = IDENTITY
            core[0, :, :, 1] = involved[q]
            cores.append(core)
        elif q == hi:
            core = np.zeros((2, 2, 2, 1), dtype=np.complex128)
            core[0, :, :, 0] = IDENTITY
            core[1, :, :, 0] = involved[q]
            cores.append(core)
        else:
            core = np.zeros((2, 2, 2, 2), dtype=np.complex128)
            core[0, :, :, 0] = IDENTITY
            core[1, :, :, 1] = involved.get(q, IDENTITY)
            cores.append(core)
    return MPO(cores)


def hadamard_layer(positions, n: int) -> MPO:
    """Rank-1 operator with Hadamards at ``positions``, identity elsewhere."""
    positions = set(positions)
    _check_positions(sorted(positions), n)
    cores = []
    for q in range(1, n + 1):
        m = HADAMARD if q in positions else IDENTITY
        cores.append(m[None, :, :, None])
    return MPO(cores)


def cnot_mpo(control: int, target: int, n: int) -> MPO:
    return controlled_mpo((control,), PAULI_X, target, n)


def toffoli_mpo(control_1: int, control_2: int, target: int, n: int) -> MPO:
    return controlled_mpo((control_1, control_2), PAULI_X, target, n)


def cphase_mpo(control: int, target: int, n: int, k: int, *, inverse: bool = False) -> MPO:
    """Controlled dyadic phase gate; control and target are interchangeable."""
    return controlled_mpo((control,), phase_shift_k(k, inverse=inverse), target, n)
