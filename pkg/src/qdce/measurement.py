"""Born statistics, postselection on the ancilla, visibility, concurrence, white noise.

The measured pair is (S, A) = (atom A2, atom A3) with g -> 0 and e -> 1, so a
two-qubit amplitude vector is indexed 2*S + A.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from qdce.hilbert import StateVector, TwoQubitDensity
from qdce.ideal import JointDistribution

PARTICLE = "particle"
WAVE = "wave"
# ancilla outcome selecting each branch
BRANCH_ANCILLA = {PARTICLE: 0, WAVE: 1}
EMPTY_BRANCH = 1e-12

_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]]).real


class UndefinedConditionalError(ValueError):
    pass


@dataclass(frozen=True)
class PostselectedStats:
    branch: str
    branch_probability: float
    conditional: tuple[float, float]


@dataclass(frozen=True)
class NoiseParams:
    epsilon: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"white-noise weight must lie in [0, 1], got {self.epsilon!r}")


State = Union[StateVector, TwoQubitDensity]


def _probabilities(state: State) -> np.ndarray:
    if isinstance(state, TwoQubitDensity):
        return np.real(np.diag(state.matrix)).copy()
    if state.dims != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {state.dims}")
    return state.probabilities()


def joint_distribution(state: State) -> JointDistribution:
    p = _probabilities(state)
    # clip the few-ulp negatives a mixed diagonal can carry
    return JointDistribution(tuple(np.clip(p, 0.0, 1.0)))


def postselect(state: State, branch: str) -> PostselectedStats:
    if branch not in BRANCH_ANCILLA:
        raise ValueError(f"branch must be {PARTICLE!r} or {WAVE!r}")
    p = _probabilities(state).reshape(2, 2)[:, BRANCH_ANCILLA[branch]]
    total = float(p.sum())
    if total < EMPTY_BRANCH:
        raise UndefinedConditionalError(f"{branch} branch has probability {total:.3g}")
    return PostselectedStats(branch, total, (float(p[0] / total), float(p[1] / total)))


def branch_state(state: StateVector, branch: str) -> StateVector:
    """Normalized conditional state of S given the ancilla outcome of ``branch``."""
    amps = state.amplitudes.reshape(2, 2)[:, BRANCH_ANCILLA[branch]]
    norm = np.linalg.norm(amps)
    if norm ** 2 < EMPTY_BRANCH:
        raise UndefinedConditionalError(f"{branch} branch has probability {norm ** 2:.3g}")
    return StateVector(amps / norm, (2,))


def visibility(curve: Sequence[float]) -> float:
    curve = np.asarray(curve, dtype=float)
    if curve.size < 3:
        raise ValueError("visibility needs at least three samples")
    hi, lo = curve.max(), curve.min()
    if hi + lo == 0:
        raise ValueError("visibility undefined for an identically zero curve")
    return float((hi - lo) / (hi + lo))


def _sqrt_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def concurrence(rho: TwoQubitDensity) -> float:
    """Wootters concurrence.

    The lambda_i are taken as singular values of sqrt(rho~) sqrt(rho) rather
    than square roots of eig(rho rho~); the latter turns 1e-16 noise into
    1e-8 errors for pure states.
    """
    if not isinstance(rho, TwoQubitDensity):
        rho = TwoQubitDensity(rho)
    m = rho.matrix
    root = _sqrt_psd(m)
    root_tilde = _YY @ root.conj() @ _YY
    lam = np.linalg.svd(root_tilde @ root, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def pure_state_concurrence(state: StateVector) -> float:
    a, b, c, d = state.amplitudes
    return float(2 * abs(a * d - b * c))


def white_noise_mix(rho: TwoQubitDensity, noise: Union[NoiseParams, float]) -> TwoQubitDensity:
    if not isinstance(noise, NoiseParams):
        noise = NoiseParams(float(noise))
    eps = noise.epsilon
    return TwoQubitDensity((1 - eps) * rho.matrix + eps * np.eye(4) / 4)
