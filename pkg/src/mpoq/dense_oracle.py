"""Brute-force statevector reference used as ground truth in tests.

Everything here works on flat numpy arrays of length ``2**n`` indexed with
the first qubit as the most significant bit.  The implementation is kept
deliberately independent of the tensor-network code so that agreement
between the two paths is evidence rather than tautology.  Intended for
desk scale only (roughly n <= 20).
"""

from __future__ import annotations

import numpy as np

ORACLE_CAP_QUBITS = 20


def basis_state(bits) -> np.ndarray:
    """Unit vector for the given bit pattern (first bit most significant)."""
    bits = list(bits)
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    state = np.zeros(2 ** len(bits), dtype=np.complex128)
    state[index] = 1.0
    return state


def num_qubits(state: np.ndarray) -> int:
    n = int(round(np.log2(state.size)))
    if 2 ** n != state.size:
        raise ValueError(f"state length {state.size} is not a power of two")
    return n


def apply_gate_dense(state: np.ndarray, matrix: np.ndarray, target: int, controls=()) -> np.ndarray:
    """Apply a (multi-)controlled 2x2 gate to a statevector.

    ``target`` and ``controls`` are 1-based qubit positions.  The gate acts
    on the subspace where every control qubit is 1.
    """
    n = num_qubits(state)
    if n > ORACLE_CAP_QUBITS:
        raise ValueError(f"oracle capped at {ORACLE_CAP_QUBITS} qubits, got {n}")
    positions = (target, *controls)
    if len(set(positions)) != len(positions):
        raise ValueError("overlapping gate positions")
    for p in positions:
        if not 1 <= p <= n:
            raise ValueError(f"position {p} outside register [1, {n}]")
    matrix = np.asarray(matrix, dtype=np.complex128)
    psi = state.reshape((2,) * n).copy()
    selector = [slice(None)] * n
    for c in controls:
        selector[c - 1] = 1
    sub = psi[tuple(selector)]
    # axis of the target among the remaining (uncollapsed) axes
    axis = target - 1 - sum(1 for c in controls if c < target)
    sub = np.moveaxis(sub, axis, 0)
    sub = np.tensordot(matrix, sub, axes=([1], [0]))
    psi[tuple(selector)] = np.moveaxis(sub, 0, axis)
    return psi.reshape(-1)


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix with entries exp(2 pi i x y / 2^n) / sqrt(2^n)."""
    size = 2 ** n
    grid = np.outer(np.arange(size), np.arange(size))
    return np.exp(2j * np.pi * grid / size) / np.sqrt(size)


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Index permutation that reverses the qubit order of a length-2^n vector."""
    out = np.zeros(2 ** n, dtype=np.int64)
    for x in range(2 ** n):
        out[x] = int(format(x, f"0{n}b")[::-1], 2)
    return out


def full_adder_truth(c_in: int, a: int, b: int) -> tuple[int, int]:
    """Classical one-bit full adder: (sum, carry-out)."""
    total = c_in + a + b
    return total % 2, total // 2


def mod_exp(a: int, x: int, modulus: int) -> int:
    """a**x mod modulus."""
    return pow(a, x, modulus)


def born_distribution(state: np.ndarray) -> np.ndarray:
    """Measurement distribution |psi|^2 / Z over all basis states."""
    probs = np.abs(state) ** 2
    z = probs.sum()
    if z == 0.0:
        raise ValueError("zero state has no Born distribution")
    return probs / z


def marginal_dense(probs: np.ndarray, measured, n: int) -> np.ndarray:
    """Marginal of a length-2^n distribution over 1-based positions ``measured``.

    Returns a tensor of shape (2,)*m ordered like ``sorted(measured)``.
    """
    measured = sorted(measured)
    keep = [p - 1 for p in measured]
    drop = tuple(i for i in range(n) if i not in keep)
    return probs.reshape((2,) * n).sum(axis=drop)
