"""Matrix product state and operator containers plus the algebra on them.

States live in a chain of order-3 cores of shape ``(r_left, d, r_right)``,
operators in a chain of order-4 cores of shape ``(R_left, d, d, R_right)``
with the row (output) physical index first.  Boundary bond dimensions are
always 1.  All values are immutable after construction: every operation
returns a new object, and the stored arrays are marked read-only so they
can be shared freely across threads.

Bond indices use one fixed lumping convention throughout (first index
varies fastest, i.e. Fortran-order reshapes), which keeps the SVD sweeps
deterministic.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

DEFAULT_DENSE_CAP = 2 ** 20

#: Tolerance used to certify bond orthonormality.
ORTH_TOL = 1e-10


class DenseCapExceeded(ValueError):
    """Raised when a dense reconstruction would exceed the size guard."""


def dense_cap() -> int:
    """Largest dense object size allowed, overridable via ``MPOQ_DENSE_CAP``."""
    value = os.environ.get("MPOQ_DENSE_CAP")
    return int(value) if value else DEFAULT_DENSE_CAP


@dataclass(frozen=True)
class TruncationPolicy:
    """Singular-value cut-off rule for orthonormalization sweeps.

    Singular values below ``rel_threshold * sigma_max`` are discarded;
    ``max_rank``, when set, caps the number of kept values.  The default
    strips numerical noise only; ``rel_threshold=0`` with no cap is
    lossless up to floating point.
    """

    rel_threshold: float = 1e-12
    max_rank: int | None = None

    def __post_init__(self) -> None:
        if self.rel_threshold < 0:
            raise ValueError("rel_threshold must be >= 0")
        if self.max_rank is not None and self.max_rank < 1:
            raise ValueError("max_rank must be >= 1")

    def keep_count(self, singular_values: np.ndarray) -> int:
        smax = singular_values[0] if singular_values.size else 0.0
        if smax <= 0.0:
            keep = 1
        else:
            keep = int(np.count_nonzero(singular_values > self.rel_threshold * smax))
            keep = max(keep, 1)
        if self.max_rank is not None:
            keep = min(keep, self.max_rank)
        return keep


#: Policy used by the circuit executors: strips numerical noise only.
DEFAULT_POLICY = TruncationPolicy()

#: Keeps every nonzero singular value.
LOSSLESS = TruncationPolicy(rel_threshold=0.0)


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    out.flags.writeable = False
    return out


class MPS:
    """Matrix product state: a chain of order-3 complex cores.

    Core ``i`` has shape ``(r_{i-1}, d_i, r_i)`` with ``r_0 = r_n = 1``.
    ``right_orthonormal=True`` certifies that every core except the first
    has an orthonormal right unfolding; only the sweep routines set it.
    """

    __slots__ = ("cores", "right_orthonormal")

    def __init__(self, cores, *, right_orthonormal: bool = False) -> None:
        cores = [_freeze(c) for c in cores]
        if not cores:
            raise ValueError("an MPS needs at least one core")
        for i, core in enumerate(cores):
            if core.ndim != 3:
                raise ValueError(f"core {i} must have order 3, got shape {core.shape}")
            if core.shape[1] < 1:
                raise ValueError(f"core {i} has empty physical dimension")
        if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
            raise ValueError("boundary bond dimensions must be 1")
        for i in range(1, len(cores)):
            if cores[i].shape[0] != cores[i - 1].shape[2]:
                raise ValueError(f"bond mismatch between cores {i - 1} and {i}")
        self.cores = tuple(cores)
        self.right_orthonormal = right_orthonormal

    @property
    def n(self) -> int:
        return len(self.cores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + tuple(c.shape[2] for c in self.cores)

    @property
    def max_rank(self) -> int:
        return max(self.ranks)

    def element(self, indices) -> complex:
        """Single tensor entry: the product of the selected core slices."""
        if len(indices) != self.n:
            raise ValueError("index list length must match the number of sites")
        vec = None
        for core, x in zip(self.cores, indices):
            if not 0 <= x < core.shape[1]:
                raise IndexError(f"physical index {x} out of range [0, {core.shape[1]})")
            vec = core[:, x, :] if vec is None else vec @ core[:, x, :]
        return complex(vec[0, 0])

    def to_dense(self) -> np.ndarray:
        """Full contraction into a vector of size ``prod(dims)`` (guarded)."""
        size = int(np.prod(self.dims, dtype=np.int64))
        if size > dense_cap():
            raise DenseCapExceeded(f"dense state of size {size} exceeds cap {dense_cap()}")
        acc = self.cores[0].reshape(self.dims[0], -1)
        for core in self.cores[1:]:
            acc = np.tensordot(acc, core, axes=([1], [0]))
            acc = acc.reshape(-1, core.shape[2])
        return acc[:, 0]

    def norm(self) -> float:
        """Euclidean norm of the represented tensor."""
        env = np.ones((1, 1), dtype=np.complex128)
        for core in self.cores:
            env = np.einsum("kl,kxm,lxn->mn", env, core.conj(), core, optimize=True)
        return float(np.sqrt(abs(env[0, 0])))

    def normalized(self) -> "MPS":
        nrm = self.norm()
        if nrm == 0.0:
            raise ZeroDivisionError("cannot normalize the zero tensor")
        cores = list(self.cores)
        cores[0] = cores[0] / nrm
        return MPS(cores, right_orthonormal=self.right_orthonormal)

    def scaled(self, factor: complex) -> "MPS":
        cores = list(self.cores)
        cores[0] = cores[0] * factor
        return MPS(cores)

    def to_debug_json(self) -> str:
        """JSON dump of ranks, dims and cores as nested [re, im] pairs."""
        payload = {
            "kind": "mps",
            "dims": list(self.dims),
            "ranks": list(self.ranks),
            "cores": [np.stack([c.real, c.imag], axis=-1).tolist() for c in self.cores],
        }
        return json.dumps(payload)


class MPO:
    """Matrix product operator: a chain of order-4 complex cores.

    Core ``i`` has shape ``(R_{i-1}, d_i, d_i, R_i)`` with the output
    (row) physical index before the input (column) one.
    """

    __slots__ = ("cores",)

    def __init__(self, cores) -> None:
        cores = [_freeze(c) for c in cores]
        if not cores:
            raise ValueError("an MPO needs at least one core")
        for i, core in enumerate(cores):
            if core.ndim != 4:
                raise ValueError(f"core {i} must have order 4, got shape {core.shape}")
            if core.shape[1] != core.shape[2]:
                raise ValueError(f"core {i} must act on square physical slots")
        if cores[0].shape[0] != 1 or cores[-1].shape[3] != 1:
            raise ValueError("boundary bond dimensions must be 1")
        for i in range(1, len(cores)):
            if cores[i].shape[0] != cores[i - 1].shape[3]:
                raise ValueError(f"bond mismatch between cores {i - 1} and {i}")
        self.cores = tuple(cores)

    @classmethod
    def identity(cls, n: int, d: int = 2) -> "MPO":
        eye = np.eye(d, dtype=np.complex128)[None, :, :, None]
        return cls([eye] * n)

    @property
    def n(self) -> int:
        return len(self.cores)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.shape[1] for c in self.cores)

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + tuple(c.shape[3] for c in self.cores)

    @property
    def max_rank(self) -> int:
        return max(self.ranks)

    def to_dense(self) -> np.ndarray:
        """Full contraction into a ``prod(dims) x prod(dims)`` matrix (guarded)."""
        size = int(np.prod(self.dims, dtype=np.int64))
        if size * size > dense_cap():
            raise DenseCapExceeded(f"dense operator of size {size}^2 exceeds cap {dense_cap()}")
        acc = self.cores[0]
        for core in self.cores[1:]:
            acc = np.einsum("aijb,bklc->aikjlc", acc, core, optimize=True)
            s = acc.shape
            acc = acc.reshape(s[0], s[1] * s[2], s[3] * s[4], s[5])
        return acc[0, :, :, 0]

    def apply(self, state: MPS) -> MPS:
        """Operator-state product; output ranks are the exact products."""
        if self.dims != state.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {state.dims}")
        cores = []
        for g, t in zip(self.cores, state.cores):
            merged = np.einsum("KxzL,kzl->KkxLl", g, t, optimize=True)
            s = merged.shape
            cores.append(merged.reshape(s[0] * s[1], s[2], s[3] * s[4]))
        return MPS(cores)

    def __matmul__(self, other):
        if isinstance(other, MPS):
            return self.apply(other)
        if not isinstance(other, MPO):
            return NotImplemented
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")
        cores = []
        for g, h in zip(self.cores, other.cores):
            merged = np.einsum("KxzL,kzyl->KkxyLl", g, h, optimize=True)
            s = merged.shape
            cores.append(merged.reshape(s[0] * s[1], s[2], s[3], s[4] * s[5]))
        return MPO(cores)

    def conj(self) -> "MPO":
        """Elementwise complex conjugate of the represented operator."""
        return MPO([c.conj() for c in self.cores])

    def adjoint(self) -> "MPO":
        """Conjugate transpose of the represented operator."""
        return MPO([c.conj().transpose(0, 2, 1, 3) for c in self.cores])

    def to_debug_json(self) -> str:
        payload = {
            "kind": "mpo",
            "dims": list(self.dims),
            "ranks": list(self.ranks),
            "cores": [np.stack([c.real, c.imag], axis=-1).tolist() for c in self.cores],
        }
        return json.dumps(payload)


# ---------------------------------------------------------------------------
# construction helpers


def basis_state_mps(bits) -> MPS:
    """Rank-one MPS for a computational basis state (first bit most significant)."""
    bits = list(bits)
    if not bits:
        raise ValueError("empty bit list")
    cores = []
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        core = np.zeros((1, 2, 1), dtype=np.complex128)
        core[0, b, 0] = 1.0
        cores.append(core)
    return MPS(cores, right_orthonormal=True)


_KET0 = np.array([1.0, 0.0], dtype=np.complex128)
_KET1 = np.array([0.0, 1.0], dtype=np.complex128)


def named_state_mps(name: str, n: int) -> MPS:
    """Factory for well-known entangled states (normalized).

    Supported names: ``ghz``, ``w``, ``bell_phi_plus``, ``bell_phi_minus``,
    ``bell_psi_plus``, ``bell_psi_minus``.  The Bell states require ``n=2``;
    the W state has bond dimension 2.
    """
    key = name.strip().lower()
    if n < 2:
        raise ValueError("named entangled states need n >= 2")
    if key == "ghz":
        first = np.zeros((1, 2, 2), dtype=np.complex128)
        first[0, 0, 0] = first[0, 1, 1] = 1.0 / np.sqrt(2.0)
        mid = np.zeros((2, 2, 2), dtype=np.complex128)
        mid[0, 0, 0] = mid[1, 1, 1] = 1.0
        last = np.zeros((2, 2, 1), dtype=np.complex128)
        last[0, 0, 0] = last[1, 1, 0] = 1.0
        return MPS([first] + [mid] * (n - 2) + [last])
    if key == "w":
        first = np.zeros((1, 2, 2), dtype=np.complex128)
        first[0, 1, 0] = first[0, 0, 1] = 1.0 / np.sqrt(n)
        mid = np.zeros((2, 2, 2), dtype=np.complex128)
        mid[0, 0, 0] = 1.0
        mid[1, 1, 0] = mid[1, 0, 1] = 1.0
        last = np.zeros((2, 2, 1), dtype=np.complex128)
        last[0, 0, 0] = 1.0
        last[1, 1, 0] = 1.0
        return MPS([first] + [mid] * (n - 2) + [last])
    if key.startswith("bell_"):
        if n != 2:
            raise ValueError("Bell states are two-qubit states")
        sign = 1.0 if key.endswith("plus") else -1.0
        first = np.zeros((1, 2, 2), dtype=np.complex128)
        last = np.zeros((2, 2, 1), dtype=np.complex128)
        if key in ("bell_phi_plus", "bell_phi_minus"):
            first[0, 0, 0] = 1.0 / np.sqrt(2.0)
            first[0, 1, 1] = 1.0 / np.sqrt(2.0)
            last[0, 0, 0] = 1.0
            last[1, 1, 0] = sign
        elif key in ("bell_psi_plus", "bell_psi_minus"):
            first[0, 0, 0] = 1.0 / np.sqrt(2.0)
            first[0, 1, 1] = 1.0 / np.sqrt(2.0)
            last[0, 1, 0] = 1.0
            last[1, 0, 0] = sign
        else:
            raise ValueError(f"unknown state name {name!r}")
        return MPS([first, last])
    raise ValueError(f"unknown state name {name!r}")


def random_mps(n: int, max_rank: int, seed=None, d: int = 2) -> MPS:
    """Normalized random MPS with internal ranks ``min(max_rank, d^i, d^(n-i))``."""
    rng = np.random.default_rng(seed)
    ranks = [1]
    for i in range(1, n):
        ranks.append(int(min(max_rank, d ** i, d ** (n - i))))
    ranks.append(1)
    cores = []
    for i in range(n):
        shape = (ranks[i], d, ranks[i + 1])
        cores.append(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return MPS(cores).normalized()


# ---------------------------------------------------------------------------
# unfoldings (fixed lumping convention: first index fastest)


def _right_unfold(core: np.ndarray) -> np.ndarray:
    r, d, s = core.shape
    return core.reshape(r, d * s, order="F")


def _right_fold(mat: np.ndarray, d: int, s: int) -> np.ndarray:
    return mat.reshape(mat.shape[0], d, s, order="F")


def _left_unfold(core: np.ndarray) -> np.ndarray:
    r, d, s = core.shape
    return core.reshape(r * d, s, order="F")


def _left_fold(mat: np.ndarray, r: int, d: int) -> np.ndarray:
    return mat.reshape(r, d, mat.shape[1], order="F")


def _truncated_svd(mat: np.ndarray, policy: TruncationPolicy):
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    keep = policy.keep_count(s)
    return u[:, :keep], s[:keep], vh[:keep, :]


# ---------------------------------------------------------------------------
# orthonormalization


def orthonormalize_right(state: MPS, policy: TruncationPolicy = DEFAULT_POLICY) -> MPS:
    """Right-to-left SVD sweep; afterwards all cores but the first are
    right-orthonormal and the ranks are non-increasing."""
    cores = [np.asarray(c) for c in state.cores]
    for i in range(len(cores) - 1, 0, -1):
        _, d, s = cores[i].shape
        u, sv, vh = _truncated_svd(_right_unfold(cores[i]), policy)
        cores[i] = _right_fold(vh, d, s)
        cores[i - 1] = np.einsum("kxl,lm->kxm", cores[i - 1], u * sv)
    return MPS(cores, right_orthonormal=True)


def orthonormalize_left(state: MPS, policy: TruncationPolicy = DEFAULT_POLICY) -> MPS:
    """Left-to-right SVD sweep; afterwards all cores but the last are
    left-orthonormal and the ranks are non-increasing."""
    cores = [np.asarray(c) for c in state.cores]
    for i in range(len(cores) - 1):
        r, d, _ = cores[i].shape
        u, sv, vh = _truncated_svd(_left_unfold(cores[i]), policy)
        cores[i] = _left_fold(u, r, d)
        cores[i + 1] = np.einsum("lm,mxn->lxn", sv[:, None] * vh, cores[i + 1])
    return MPS(cores)


def is_right_orthonormal(state: MPS, tol: float = ORTH_TOL) -> bool:
    """Certify that cores 2..n have orthonormal right unfoldings."""
    for core in state.cores[1:]:
        mat = _right_unfold(core)
        gram = mat @ mat.conj().T
        if np.max(np.abs(gram - np.eye(mat.shape[0]))) > tol:
            return False
    return True


def _mpo_as_mps(op: MPO) -> MPS:
    cores = []
    for c in op.cores:
        r, d, _, s = c.shape
        cores.append(c.reshape(r, d * d, s))
    return MPS(cores)


def _mps_as_mpo(state: MPS, dims) -> MPO:
    cores = []
    for c, d in zip(state.cores, dims):
        r, _, s = c.shape
        cores.append(np.asarray(c).reshape(r, d, d, s))
    return MPO(cores)


def compress_mpo(op: MPO, policy: TruncationPolicy = DEFAULT_POLICY) -> MPO:
    """Two-sided rounding of an MPO down to (numerically) minimal ranks.

    A lossless right sweep orthonormalizes the chain, then a left sweep
    applies the requested truncation against the orthonormal environment.
    """
    via = _mpo_as_mps(op)
    via = orthonormalize_right(via, LOSSLESS)
    via = orthonormalize_left(via, policy)
    return _mps_as_mpo(via, op.dims)


# ---------------------------------------------------------------------------
# core manipulation


def _right_multiplied(core: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.tensordot(core, q, axes=([core.ndim - 1], [0]))


def _left_multiplied(core: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.tensordot(q, core, axes=([1], [0]))


def _rebuild(value, cores):
    if isinstance(value, MPO):
        return MPO(cores)
    return MPS(cores)


def transform_core_right(value, i: int, q: np.ndarray):
    """Multiply core ``i`` (0-based) of an MPS or MPO by ``q`` on its right bond.

    Changes the represented tensor unless compensated at core ``i+1``;
    ``q`` may be singular.
    """
    q = np.asarray(q, dtype=np.complex128)
    cores = list(value.cores)
    last_axis = cores[i].ndim - 1
    if q.shape[0] != cores[i].shape[last_axis]:
        raise ValueError(f"q has {q.shape[0]} rows, core {i} has right rank {cores[i].shape[last_axis]}")
    cores[i] = _right_multiplied(cores[i], q)
    if i + 1 < len(cores) and cores[i + 1].shape[0] != q.shape[1]:
        raise ValueError("transforming the last bond of a non-final core breaks the chain")
    return _rebuild(value, cores)


def transform_core_left(value, i: int, q: np.ndarray):
    """Multiply core ``i`` (0-based) of an MPS or MPO by ``q`` on its left bond."""
    q = np.asarray(q, dtype=np.complex128)
    cores = list(value.cores)
    if q.shape[1] != cores[i].shape[0]:
        raise ValueError(f"q has {q.shape[1]} columns, core {i} has left rank {cores[i].shape[0]}")
    cores[i] = _left_multiplied(cores[i], q)
    if i > 0 and cores[i - 1].shape[cores[i - 1].ndim - 1] != q.shape[0]:
        raise ValueError("transforming the first bond of a non-initial core breaks the chain")
    return _rebuild(value, cores)


def transform_bond(value, i: int, q: np.ndarray):
    """Insert ``q`` and ``q^{-1}`` on bond ``i`` (between cores ``i`` and ``i+1``).

    Works on states and operators; the represented tensor is preserved
    exactly.  Raises ``numpy.linalg.LinAlgError`` for singular ``q``.
    """
    q = np.asarray(q, dtype=np.complex128)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("paired bond transform needs a square matrix")
    q_inv = np.linalg.inv(q)
    cores = list(value.cores)
    if i + 1 >= len(cores):
        raise IndexError("bond index out of range")
    cores[i] = _right_multiplied(cores[i], q)
    cores[i + 1] = _left_multiplied(cores[i + 1], q_inv)
    return _rebuild(value, cores)


def mpo_add(left: MPO, right: MPO) -> MPO:
    """Sum of two operators via block-diagonal bond stacking (ranks add)."""
    if left.dims != right.dims:
        raise ValueError(f"dimension mismatch: {left.dims} vs {right.dims}")
    n = left.n
    cores = []
    for i, (a, b) in enumerate(zip(left.cores, right.cores)):
        ra, d, _, sa = a.shape
        rb, _, _, sb = b.shape
        if n == 1:
            cores.append(a + b)
        elif i == 0:
            cores.append(np.concatenate([a, b], axis=3))
        elif i == n - 1:
            cores.append(np.concatenate([a, b], axis=0))
        else:
            out = np.zeros((ra + rb, d, d, sa + sb), dtype=np.complex128)
            out[:ra, :, :, :sa] = a
            out[ra:, :, :, sa:] = b
            cores.append(out)
    return MPO(cores)


def diag_mpo(state: MPS) -> MPO:
    """Diagonal operator whose diagonal is the represented tensor.

    Satisfies ``diag_mpo(T) @ T == T * T`` elementwise.
    """
    cores = []
    for c in state.cores:
        r, d, s = c.shape
        out = np.zeros((r, d, d, s), dtype=np.complex128)
        for x in range(d):
            out[:, x, x, :] = c[:, x, :]
        cores.append(out)
    return MPO(cores)
