"""Dense state-vector algebra for a handful of qubits.

Index convention is big-endian: qubit 0 is the most significant bit of the
amplitude index, so a three-qubit register (q0, q1, q2) stores |q0 q1 q2> at
index 4*q0 + 2*q1 + q2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_QUBITS = 5
NORM_TOL = 1e-10


class QubitCapacityError(ValueError):
    """Raised when a register would exceed ``MAX_QUBITS``."""


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable amplitude array over ``n_qubits`` qubits.

    ``normalized=False`` marks residuals (e.g. partial projections) whose
    squared norm carries a probability and must not be rescaled.
    """

    amps: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        size = amps.size
        if size < 2 or size & (size - 1):
            raise ValueError(f"amplitude count must be a power of two >= 2, got {size}")
        n = size.bit_length() - 1
        if n > MAX_QUBITS:
            raise QubitCapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
        norm_sq = float(np.vdot(amps, amps).real)
        # NaN/Inf anywhere (or overflow) poisons the squared norm
        if not math.isfinite(norm_sq):
            raise ValueError("amplitudes must be finite")
        if self.normalized:
            if abs(norm_sq - 1.0) > NORM_TOL:
                raise ValueError(f"state tagged normalized has squared norm {norm_sq!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def n_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalize(self) -> StateVector:
        peak = np.max(np.abs(self.amps))
        if peak == 0.0:
            raise ValueError("cannot normalize the zero vector")
        # pre-scale so subnormal residuals keep full precision
        v = self.amps / peak
        return StateVector(v / np.sqrt(np.vdot(v, v).real))

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        """Computational basis state, e.g. ``StateVector.basis("0110")``."""
        amps = np.zeros(2 ** len(bits), dtype=np.complex128)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def __repr__(self):
        tag = "" if self.normalized else ", normalized=False"
        return f"StateVector({np.array2string(self.amps, precision=6)}{tag})"


def tensor(left: StateVector, right: StateVector) -> StateVector:
    n = left.n_qubits + right.n_qubits
    if n > MAX_QUBITS:
        raise QubitCapacityError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
    return StateVector(np.outer(left.amps, right.amps).reshape(-1), normalized=left.normalized and right.normalized)


def _check_qubits(qubits: Sequence[int], n: int) -> list[int]:
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit in {qubits}")
    if any(q < 0 or q >= n for q in qubits):
        raise ValueError(f"qubit index out of range for {n} qubits: {qubits}")
    return qubits


def permute_qubits(state: StateVector, perm: Sequence[int]) -> StateVector:
    """Reorder qubits so that output qubit ``k`` is input qubit ``perm[k]``."""
    n = state.n_qubits
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of range({n})")
    return StateVector(state.amps.reshape([2] * n).transpose(perm).reshape(-1), normalized=state.normalized)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    return [int(k) for k in np.argsort(perm)]


def _front(state: StateVector, targets: list[int]) -> tuple[np.ndarray, list[int]]:
    """Tensor view with ``targets`` moved to the leading axes (in order)."""
    n = state.n_qubits
    rest = [q for q in range(n) if q not in targets]
    order = targets + rest
    view = state.amps.reshape([2] * n).transpose(order)
    return view.reshape(2 ** len(targets), -1), order


def apply_unitary(state: StateVector, u: np.ndarray, targets: Sequence[int]) -> StateVector:
    """Apply ``u`` to ``targets``; ``targets[0]`` maps to the top index bit of ``u``.

    A non-unitary ``u`` acting on a normalized state raises ``ValueError``
    through the norm check rather than being silently rescaled.
    """
    n = state.n_qubits
    targets = _check_qubits(targets, n)
    u = np.asarray(u, dtype=np.complex128)
    dim = 2 ** len(targets)
    if u.shape != (dim, dim):
        raise ValueError(f"operator of shape {u.shape} does not act on {len(targets)} qubit(s)")
    flat, order = _front(state, targets)
    out = (u @ flat).reshape([2] * n).transpose(inverse_permutation(order)).reshape(-1)
    return StateVector(out, normalized=state.normalized)


def project_subsystem(state: StateVector, bra: StateVector, targets: Sequence[int]) -> tuple[StateVector, float]:
    """Contract ``<bra|`` against ``targets`` of ``state``.

    Returns the unnormalized residual on the remaining qubits (original order
    kept) and its squared norm.  The bra amplitudes are conjugated.
    """
    n = state.n_qubits
    targets = _check_qubits(targets, n)
    if bra.n_qubits != len(targets):
        raise ValueError(f"bra has {bra.n_qubits} qubits but {len(targets)} targets were given")
    if len(targets) == n:
        raise ValueError("projection must leave at least one qubit")
    flat, _ = _front(state, targets)
    residual = bra.amps.conj() @ flat
    return StateVector(residual, normalized=False), float(np.vdot(residual, residual).real)


def inner(x: StateVector, y: StateVector) -> complex:
    """<x|y>, conjugate-linear in ``x``."""
    if x.n_qubits != y.n_qubits:
        raise ValueError(f"qubit count mismatch: {x.n_qubits} vs {y.n_qubits}")
    return complex(np.vdot(x.amps, y.amps))


def fidelity_up_to_phase(x: StateVector, y: StateVector) -> float:
    return abs(inner(x, y)) ** 2


def check_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    err = np.abs(u.conj().T @ u - np.eye(u.shape[0]))
    return bool(err.max() <= tol)
