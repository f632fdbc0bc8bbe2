"""Dense linear algebra on the (A1, A2, A3, cavity) register.

Qubit basis order is |g> then |e> (|g> <-> 0, |e> <-> 1); Fock states are
ascending.  Both states and operators carry their subsystem dimensions so
that composite objects can be split again by ``partial_trace``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

A1, A2, A3, CAVITY = 0, 1, 2, 3
QUBIT_LEVELS = {"g": 0, "e": 1}


class DimensionError(ValueError):
    pass


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


def register_dims(n_max: int = 2) -> tuple[int, ...]:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return (2, 2, 2, n_max + 1)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        dims = tuple(int(d) for d in self.dims)
        if amps.size != int(np.prod(dims)):
            raise DimensionError(f"{amps.size} amplitudes do not fit dims {dims}")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    def __len__(self):
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def scaled(self, factor: complex) -> StateVector:
        return StateVector(factor * self.amplitudes, self.dims)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = _frozen(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        n = int(np.prod(dims))
        if mat.shape != (n, n):
            raise DimensionError(f"matrix of shape {mat.shape} does not act on dims {dims}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    def __matmul__(self, other):
        if other.dims != self.dims:
            raise DimensionError(f"dims {self.dims} vs {other.dims}")
        if isinstance(other, StateVector):
            return StateVector(self.matrix @ other.amplitudes, self.dims)
        if isinstance(other, Operator):
            return Operator(self.matrix @ other.matrix, self.dims)
        return NotImplemented

    def dag(self) -> Operator:
        return Operator(self.matrix.conj().T, self.dims)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))

    def is_unitary(self, tol: float = 1e-12) -> bool:
        return self.unitarity_error() <= tol


@dataclass(frozen=True, eq=False)
class TwoQubitDensity:
    """Validated 4x4 density matrix of two qubits (A2 then A3)."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.matrix)
        if rho.shape != (4, 4):
            raise DimensionError(f"expected a 4x4 matrix, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValueError(f"density matrix has trace {np.trace(rho).real!r}")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def from_state(cls, state: StateVector) -> TwoQubitDensity:
        if state.dims != (2, 2):
            raise DimensionError(f"expected a two-qubit state, got dims {state.dims}")
        return cls(state.projector())

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def qubit(label: str) -> StateVector:
    amps = np.zeros(2, dtype=complex)
    amps[QUBIT_LEVELS[label]] = 1
    return StateVector(amps, (2,))


def fock(n: int, n_max: int) -> StateVector:
    if not 0 <= n <= n_max:
        raise ValueError(f"Fock level {n} outside 0..{n_max}")
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[n] = 1
    return StateVector(amps, (n_max + 1,))


def basis_state(levels: Sequence[int], dims: Sequence[int]) -> StateVector:
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    amps[np.ravel_multi_index(tuple(levels), tuple(dims))] = 1
    return StateVector(amps, tuple(dims))


def basis_labels(dims: Sequence[int], cavity_last: bool = True) -> list[str]:
    """Labels like ``g,e,g,1`` in amplitude order; qubits as g/e, the mode as n."""
    n_qubits = len(dims) - 1 if cavity_last else len(dims)
    return [
        ",".join("ge"[i] if k < n_qubits else str(i) for k, i in enumerate(idx))
        for idx in np.ndindex(*dims)
    ]


def identity(dims: Sequence[int]) -> Operator:
    return Operator(np.eye(int(np.prod(dims))), tuple(dims))


def sigma_plus() -> Operator:
    # |e><g|
    return Operator([[0, 0], [1, 0]], (2,))


def sigma_minus() -> Operator:
    return Operator([[0, 1], [0, 0]], (2,))


def sigma_ee() -> Operator:
    return Operator([[0, 0], [0, 1]], (2,))


def sigma_x() -> Operator:
    return Operator([[0, 1], [1, 0]], (2,))


def annihilation(n_max: int) -> Operator:
    return Operator(np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1), (n_max + 1,))


def creation(n_max: int) -> Operator:
    return annihilation(n_max).dag()


def number(n_max: int) -> Operator:
    return Operator(np.diag(np.arange(n_max + 1)), (n_max + 1,))


def tensor(factors):
    factors = list(factors)
    if not factors:
        raise ValueError("tensor of no factors")
    kinds = {type(f) for f in factors}
    if len(kinds) != 1 or kinds.pop() not in (StateVector, Operator):
        raise TypeError("tensor factors must all be StateVector or all Operator")
    dims = tuple(d for f in factors for d in f.dims)
    if isinstance(factors[0], StateVector):
        return StateVector(reduce(np.kron, [f.amplitudes for f in factors]), dims)
    return Operator(reduce(np.kron, [f.matrix for f in factors]), dims)


def embed(op: Operator, targets: Sequence[int], dims: Sequence[int]) -> Operator:
    """Lift ``op`` onto ``targets`` of a register, identity elsewhere.

    ``op``'s own subsystem order follows ``targets``, so ``targets=(A1, CAVITY)``
    means the first factor of ``op`` acts on A1.
    """
    dims = tuple(dims)
    targets = tuple(targets)
    if len(set(targets)) != len(targets) or any(not 0 <= t < len(dims) for t in targets):
        raise DimensionError(f"bad targets {targets} for {len(dims)} subsystems")
    if op.dims != tuple(dims[t] for t in targets):
        raise DimensionError(f"operator dims {op.dims} do not match targets {targets} of {dims}")
    rest = [k for k in range(len(dims)) if k not in targets]
    order = list(targets) + rest
    rest_dim = int(np.prod([dims[k] for k in rest]))
    full = np.kron(op.matrix, np.eye(rest_dim))
    perm_dims = [dims[k] for k in order]
    n = len(dims)
    full = full.reshape(perm_dims + perm_dims)
    inverse = np.argsort(order)
    full = full.transpose(list(inverse) + [n + k for k in inverse])
    size = int(np.prod(dims))
    return Operator(full.reshape(size, size), dims)


def partial_trace(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix over ``keep`` (in the given order)."""
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep) or any(not 0 <= k < len(state.dims) for k in keep):
        raise DimensionError(f"bad subsystem selection {keep} for dims {state.dims}")
    traced = [k for k in range(len(state.dims)) if k not in keep]
    psi = state.amplitudes.reshape(state.dims).transpose(keep + traced)
    d_keep = int(np.prod([state.dims[k] for k in keep]))
    psi = psi.reshape(d_keep, -1)
    return psi @ psi.conj().T


def fidelity_up_to_global_phase(a: StateVector, b: StateVector) -> float:
    if a.dims != b.dims:
        raise DimensionError(f"dims {a.dims} vs {b.dims}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def pad_fock(state: StateVector, n_max: int) -> StateVector:
    """Re-embed a register state into a larger cavity truncation."""
    dims = state.dims
    if n_max + 1 < dims[-1]:
        raise DimensionError("cannot shrink the Fock space")
    tensor_ = state.amplitudes.reshape(dims)
    pad = [(0, 0)] * (len(dims) - 1) + [(0, n_max + 1 - dims[-1])]
    return StateVector(np.pad(tensor_, pad).reshape(-1), dims[:-1] + (n_max + 1,))
