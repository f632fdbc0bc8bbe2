"""The cavity circuit: three atoms, one mode, six checkpoints.

Stage order
-----------
C0  |g,g,g,0>
C1  Ramsey preparation of A1 into (|g> + i|e>)/sqrt2 and of A3 into
    cos(alpha)|g> + sin(alpha)|e>
C2  A1 crosses the cavity resonantly (gt = pi/2): its excitation moves to the mode
C3  A3 crosses dispersively: |e>_3 |1>_C picks up e^{i vartheta}
C4  A2 crosses resonantly (gt = pi/2): the mode excitation moves onto A2
C5  Ramsey pulse on A2 with theta = pi/4, chi = pi/2

Every checkpoint is audited for normalization and for population above one
photon, which the ideal sequence never creates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from qdce import dynamics
from qdce.errors import NumericalInvariantError
from qdce.hilbert import (
    A1,
    A2,
    A3,
    CAVITY,
    StateVector,
    basis_state,
    embed,
    fock,
    partial_trace,
    qubit,
    register_dims,
    tensor,
)
from qdce.measurement import WAVE, branch_state, postselect

log = logging.getLogger(__name__)

LABELS = ("C0_initial", "C1_prepared", "C2_after_swap1", "C3_after_phase",
          "C4_after_swap2", "C5_final")
LEAKAGE_TOL = 1e-12
PURITY_TOL = 1e-10
NORM_TOL = 1e-12

# phase claimed for the postselected wave branch: phi = (vartheta + pi) / 2
PAPER_SLOPE = 0.5
PAPER_OFFSET = np.pi / 2


class LeakageError(NumericalInvariantError):
    pass


class PurityError(NumericalInvariantError):
    pass


# (theta, chi) per Ramsey stage; A1 lands on (|g> + i|e>)/sqrt2 and A3 on
# cos(alpha)|g> + sin(alpha)|e> under either convention.
_PREP_SETTINGS = {
    dynamics.HAMILTONIAN: {"A1": (np.pi / 4, np.pi), "A3_chi": np.pi / 2},
    dynamics.PAPER_EQ7: {"A1": (np.pi / 4, 0.0), "A3_chi": 3 * np.pi / 2},
}
HADAMARD = (np.pi / 4, np.pi / 2)


@dataclass(frozen=True)
class ProtocolParams:
    alpha: float
    vartheta: float
    n_max: int = 2
    ramsey_convention: str = dynamics.HAMILTONIAN

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.vartheta)):
            raise ValueError("alpha and vartheta must be finite")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        object.__setattr__(self, "alpha", float(self.alpha) % (2 * np.pi))
        object.__setattr__(self, "vartheta", float(self.vartheta))
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "ramsey_convention",
                           dynamics.normalize_convention(self.ramsey_convention))

    @property
    def alpha_in_standard_range(self) -> bool:
        return 0.0 <= self.alpha <= np.pi / 2


@dataclass(frozen=True, eq=False)
class Checkpoint:
    label: str
    state: StateVector
    settings: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PhaseMapping:
    slope: float
    offset: float
    residual: float
    vartheta: tuple[float, ...] = ()
    phi: tuple[float, ...] = ()

    @property
    def is_affine(self) -> bool:
        return self.residual < 1e-6

    @property
    def paper_slope(self) -> float:
        return PAPER_SLOPE

    @property
    def paper_offset(self) -> float:
        return PAPER_OFFSET

    def predict(self, vartheta: float) -> float:
        return self.slope * vartheta + self.offset


@lru_cache(maxsize=512)
def _gates(n_max: int, vartheta: float, convention: str):
    dims = register_dims(n_max)
    swap = dynamics.u_on(np.pi / 2, n_max)
    had = dynamics.ramsey(*HADAMARD, convention)
    return {
        "swap1": embed(swap, (A1, CAVITY), dims),
        "phase": embed(dynamics.u_off(vartheta, n_max), (A3, CAVITY), dims),
        "swap2": embed(swap, (A2, CAVITY), dims),
        "hadamard": embed(had, (A2,), dims),
    }


def cavity_populations(state: StateVector) -> np.ndarray:
    return np.real(np.diag(partial_trace(state, [CAVITY])))


def leakage(state: StateVector) -> float:
    """Population on Fock levels >= 2."""
    return float(cavity_populations(state)[2:].sum())


def _audit(cp: Checkpoint) -> Checkpoint:
    norm_err = abs(cp.state.norm() - 1)
    if norm_err > NORM_TOL:
        raise NumericalInvariantError(f"{cp.label}: norm off by {norm_err:.3g}")
    leak = leakage(cp.state)
    if leak > LEAKAGE_TOL:
        raise LeakageError(f"{cp.label}: {leak:.3g} population above one photon")
    return cp


def run_protocol(params: ProtocolParams) -> list[Checkpoint]:
    conv, n_max = params.ramsey_convention, params.n_max
    if not params.alpha_in_standard_range:
        log.debug("alpha=%.6g lies outside [0, pi/2]; formulas still apply", params.alpha)
    prep = _PREP_SETTINGS[conv]
    a1_theta, a1_chi = prep["A1"]
    a3_theta, a3_chi = params.alpha, prep["A3_chi"]

    ground = tensor([qubit("g"), qubit("g"), qubit("g"), fock(0, n_max)])
    prepared = tensor([
        StateVector(dynamics.ramsey_ket(a1_theta, a1_chi, conv), (2,)),
        qubit("g"),
        StateVector(dynamics.ramsey_ket(a3_theta, a3_chi, conv), (2,)),
        fock(0, n_max),
    ])
    gates = _gates(n_max, params.vartheta, conv)
    after_swap1 = gates["swap1"] @ prepared
    after_phase = gates["phase"] @ after_swap1
    after_swap2 = gates["swap2"] @ after_phase
    final = gates["hadamard"] @ after_swap2

    settings = [
        {},
        {"convention": conv, "A1": (a1_theta, a1_chi), "A3": (a3_theta, a3_chi)},
        {"pair": "A1-C", "gt": np.pi / 2},
        {"pair": "A3-C", "vartheta": params.vartheta},
        {"pair": "A2-C", "gt": np.pi / 2},
        {"convention": conv, "A2": HADAMARD},
    ]
    states = [ground, prepared, after_swap1, after_phase, after_swap2, final]
    return [_audit(Checkpoint(lbl, st, s)) for lbl, st, s in zip(LABELS, states, settings)]


def cavity_vacuum_population(checkpoints: Sequence[Checkpoint]) -> float:
    return float(cavity_populations(checkpoints[-1].state)[0])


def _pure_from_density(rho: np.ndarray, dims) -> StateVector:
    # column of the largest diagonal entry: psi * conj(psi_j) / |psi_j|
    j = int(np.argmax(np.real(np.diag(rho))))
    return StateVector(rho[:, j] / np.sqrt(np.real(rho[j, j])), dims)


def final_two_atom_state(params_or_checkpoints) -> StateVector:
    """Pure A2 x A3 state left after discarding A1 and the cavity.

    The global phase is fixed by making the largest-population amplitude real
    and positive.
    """
    if isinstance(params_or_checkpoints, ProtocolParams):
        checkpoints = run_protocol(params_or_checkpoints)
    else:
        checkpoints = params_or_checkpoints
    rho = partial_trace(checkpoints[-1].state, [A2, A3])
    purity = float(np.real(np.trace(rho @ rho)))
    if purity < 1 - PURITY_TOL:
        raise PurityError(f"A2 x A3 purity {purity!r}: A1 or the cavity did not factor out")
    return _pure_from_density(rho, (2, 2))


def extract_interference_phase(wave: StateVector) -> float:
    """phi in [0, 2pi) with wave ~ cos(phi/2)|g> - i sin(phi/2)|e> up to a global phase."""
    v = np.array([wave.amplitudes[0], 1j * wave.amplitudes[1]])
    ref = v[int(np.argmax(np.abs(v)))]
    v = v * (abs(ref) / ref)
    if np.max(np.abs(v.imag)) > 1e-9:
        raise NumericalInvariantError(
            "wave branch is not of the form cos(phi/2)|g> - i sin(phi/2)|e>")
    return float((2 * np.arctan2(v.real[1], v.real[0])) % (2 * np.pi))


def wave_branch_phase(params: ProtocolParams) -> float:
    psi = final_two_atom_state(params)
    phi = extract_interference_phase(branch_state(psi, WAVE))
    # the Born pair must agree with the phase read off the amplitudes
    p0, _ = postselect(psi, WAVE).conditional
    if abs(p0 - np.cos(phi / 2) ** 2) > 1e-9:
        raise NumericalInvariantError(
            f"P(S=0|wave)={p0!r} disagrees with cos^2(phi/2) at phi={phi!r}")
    return phi


def fit_phase_mapping(vartheta_grid: Sequence[float], alpha: float = np.pi / 4,
                      n_max: int = 2, convention: str = dynamics.HAMILTONIAN) -> PhaseMapping:
    """Least-squares affine fit of the wave-branch phase against vartheta.

    The grid should be sorted and fine enough (steps below pi) for phase
    unwrapping; a poor fit shows up in ``residual`` rather than an exception.
    """
    grid = np.asarray(vartheta_grid, dtype=float)
    if np.unique(grid).size < 5:
        raise ValueError("phase fit needs at least five distinct vartheta values")
    phis = np.array([wave_branch_phase(ProtocolParams(alpha, t, n_max, convention))
                     for t in grid])
    unwrapped = np.unwrap(phis)
    slope, offset = np.polyfit(grid, unwrapped, 1)
    residual = float(np.max(np.abs(unwrapped - (slope * grid + offset))))
    if residual >= 1e-6:
        log.warning("phase mapping is not affine: residual %.3g", residual)
    return PhaseMapping(float(slope), float(offset % (2 * np.pi)), residual,
                        tuple(grid.tolist()), tuple(phis.tolist()))


def displayed_state(label: str, alpha: float, vartheta: float, n_max: int = 2) -> StateVector:
    """Register state exactly as written out for each stage of the walkthrough.

    Built from explicit kets, independently of the gate code.  The C5 form
    uses the printed |p> and |w> with phi = (vartheta + pi)/2.
    """
    dims = register_dims(n_max)
    ca, sa = np.cos(alpha), np.sin(alpha)

    def ket(a1, a2, a3, n):
        lv = {"g": 0, "e": 1}
        return basis_state((lv[a1], lv[a2], lv[a3], n), dims).amplitudes

    r2 = np.sqrt(2)
    if label == "C0_initial":
        amps = ket("g", "g", "g", 0)
    elif label == "C1_prepared":
        amps = (ca * ket("g", "g", "g", 0) + sa * ket("g", "g", "e", 0)
                + 1j * ca * ket("e", "g", "g", 0) + 1j * sa * ket("e", "g", "e", 0)) / r2
    elif label == "C2_after_swap1":
        amps = (ca * ket("g", "g", "g", 0) + sa * ket("g", "g", "e", 0)
                + ca * ket("g", "g", "g", 1) + sa * ket("g", "g", "e", 1)) / r2
    elif label == "C3_after_phase":
        amps = (ca * ket("g", "g", "g", 0) + sa * ket("g", "g", "e", 0)
                + ca * ket("g", "g", "g", 1)
                + sa * np.exp(1j * vartheta) * ket("g", "g", "e", 1)) / r2
    elif label == "C4_after_swap2":
        amps = (ca * ket("g", "g", "g", 0) + sa * ket("g", "g", "e", 0)
                - 1j * ca * ket("g", "e", "g", 0)
                - 1j * sa * np.exp(1j * vartheta) * ket("g", "e", "e", 0)) / r2
    elif label == "C5_final":
        phi = (vartheta + np.pi) / 2
        p = np.exp(1j * np.pi / 4) * np.array([1, 1j]) / r2
        w = np.exp(1j * phi / 2) * np.array([np.cos(phi / 2), -1j * np.sin(phi / 2)])
        amps = (ca * (p[0] * ket("g", "g", "g", 0) + p[1] * ket("g", "e", "g", 0))
                + sa * (w[0] * ket("g", "g", "e", 0) + w[1] * ket("g", "e", "e", 0)))
    else:
        raise KeyError(f"unknown checkpoint label {label!r}")
    return StateVector(amps, dims)

