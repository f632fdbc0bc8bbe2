"""Closed-form Mach-Zehnder with a quantum-controlled second beam splitter.

System S (interferometer path) and ancilla A are qubits; outcomes are
ordered (00, 01, 10, 11) with S as the first bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qdce.hilbert import StateVector


@dataclass(frozen=True)
class IdealParams:
    alpha: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.phi)):
            raise ValueError(f"non-finite parameters alpha={self.alpha!r}, phi={self.phi!r}")


@dataclass(frozen=True)
class JointDistribution:
    probs: tuple[float, float, float, float]

    def __post_init__(self):
        p = tuple(float(x) for x in self.probs)
        if len(p) != 4:
            raise ValueError("a joint distribution has exactly four entries")
        if any(x < -1e-12 or x > 1 + 1e-12 for x in p) or abs(sum(p) - 1) > 1e-12:
            raise ValueError(f"not a probability distribution: {p}")
        object.__setattr__(self, "probs", p)

    def __iter__(self):
        return iter(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array(self.probs)

    def marginal_s(self) -> tuple[float, float]:
        p00, p01, p10, p11 = self.probs
        return p00 + p01, p10 + p11


def particle_state(phi: float) -> StateVector:
    return StateVector(np.array([1, np.exp(1j * phi)]) / np.sqrt(2), (2,))


def wave_state(phi: float) -> StateVector:
    return StateVector(np.exp(1j * phi / 2) * np.array([np.cos(phi / 2), -1j * np.sin(phi / 2)]), (2,))


def ideal_final_state(params: IdealParams) -> StateVector:
    ca, sa = np.cos(params.alpha), np.sin(params.alpha)
    p, w = particle_state(params.phi).amplitudes, wave_state(params.phi).amplitudes
    amps = ca * np.kron(p, [1, 0]) + sa * np.kron(w, [0, 1])
    return StateVector(amps, (2, 2))


def ideal_joint_distribution(params: IdealParams) -> JointDistribution:
    ca2, sa2 = np.cos(params.alpha) ** 2, np.sin(params.alpha) ** 2
    half = params.phi / 2
    return JointDistribution((ca2 / 2, sa2 * np.cos(half) ** 2, ca2 / 2, sa2 * np.sin(half) ** 2))
