"""Atom-cavity generators, their closed-form propagators, and an expm oracle.

Gates are parameterized by dimensionless pulse areas only: ``gt`` for the
resonant exchange, ``vartheta`` for the dispersive phase and ``theta`` for a
Ramsey rotation.  Operators on qubit x mode put the atom first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qdce.hilbert import (
    Operator,
    annihilation,
    creation,
    identity,
    number,
    sigma_ee,
    sigma_minus,
    sigma_plus,
    tensor,
)

HAMILTONIAN = "hamiltonian"
PAPER_EQ7 = "paper_eq7"
CONVENTIONS = (HAMILTONIAN, PAPER_EQ7)
TWO_PI = 2 * np.pi


class ConventionError(ValueError):
    pass


def normalize_convention(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    if key not in CONVENTIONS:
        raise ConventionError(f"unknown Ramsey convention {name!r}; expected one of {CONVENTIONS}")
    return key


@dataclass(frozen=True)
class JaynesCummingsGen:
    """Resonant exchange g(sigma- a^dag + sigma+ a), in units of hbar."""

    g: float = 1.0
    n_max: int = 2

    def operator(self) -> Operator:
        a, ad = annihilation(self.n_max), creation(self.n_max)
        return Operator(
            self.g * (tensor([sigma_minus(), ad]).matrix + tensor([sigma_plus(), a]).matrix),
            (2, self.n_max + 1),
        )


@dataclass(frozen=True)
class DispersiveGen:
    """Stark-shift coupling (g^2/delta) a^dag a sigma_ee, in units of hbar."""

    chi_rate: float = 1.0
    n_max: int = 2

    def operator(self) -> Operator:
        return Operator(self.chi_rate * tensor([sigma_ee(), number(self.n_max)]).matrix,
                        (2, self.n_max + 1))


@dataclass(frozen=True)
class RamseyGen:
    """Classical drive |lambda|(e^{i chi} sigma+ + e^{-i chi} sigma-), in units of hbar."""

    amplitude: float = 1.0
    chi: float = 0.0

    def operator(self) -> Operator:
        sp = sigma_plus().matrix
        return Operator(self.amplitude * (np.exp(1j * self.chi) * sp
                                          + np.exp(-1j * self.chi) * sp.conj().T), (2,))


@dataclass(frozen=True)
class PulseSettings:
    """Pulse areas of one gate stage.

    ``theta`` is reduced into [0, 2pi) since the Ramsey map has that period
    exactly.  ``gt`` is stored as given: the n-photon block rotates at
    sqrt(n+1) g, so reducing gt modulo 2pi is only exact in the one-photon
    sector.
    """

    theta: float = 0.0
    chi: float = 0.0
    gt: float = 0.0
    vartheta: float = 0.0

    def __post_init__(self):
        vals = (self.theta, self.chi, self.gt, self.vartheta)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"pulse settings must be finite, got {vals}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)


def excitation_number(n_max: int) -> Operator:
    return Operator(tensor([sigma_ee(), identity((n_max + 1,))]).matrix
                    + tensor([identity((2,)), number(n_max)]).matrix, (2, n_max + 1))


def u_on(gt: float, n_max: int = 2) -> Operator:
    """exp(-i H_on t / hbar) built block by block in the excitation basis.

    |g,n+1> and |e,n> exchange at rate sqrt(n+1) g.  |g,0> is dark, and |e,n_max>
    has no partner inside the truncation, so both are left unchanged.
    """
    if n_max < 1:
        raise ValueError("u_on needs at least one photon level")
    dim = n_max + 1
    u = np.zeros((2 * dim, 2 * dim), dtype=complex)
    g0 = 0  # index of |g,0>
    u[g0, g0] = 1
    top = dim + n_max  # |e,n_max>
    u[top, top] = 1
    for n in range(n_max):
        e_n, g_n1 = dim + n, n + 1
        angle = gt * np.sqrt(n + 1)
        c, s = np.cos(angle), np.sin(angle)
        u[e_n, e_n] = c
        u[g_n1, g_n1] = c
        u[g_n1, e_n] = -1j * s
        u[e_n, g_n1] = -1j * s
    return Operator(u, (2, dim))


def u_off(vartheta: float, n_max: int = 2) -> Operator:
    """Diagonal dispersive gate: |e,n> -> e^{i n vartheta} |e,n>, |g,n> unchanged.

    vartheta is the signed phase picked up by |e,1>, i.e. -(g^2/delta) t.
    """
    phases = np.concatenate([np.ones(n_max + 1), np.exp(1j * vartheta * np.arange(n_max + 1))])
    return Operator(np.diag(phases), (2, n_max + 1))


def _ramsey_matrix(theta: float, chi: float, convention: str) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    if convention == HAMILTONIAN:
        # exp(-i theta (e^{i chi} sigma+ + e^{-i chi} sigma-))
        return np.array([[c, -1j * np.exp(-1j * chi) * s],
                         [-1j * np.exp(1j * chi) * s, c]])
    # printed map: |e> -> c|e> - i e^{i chi} s|g>,  |g> -> c|g> + i e^{i chi} s|e>
    return np.array([[c, -1j * np.exp(1j * chi) * s],
                     [1j * np.exp(1j * chi) * s, c]])


def ramsey(theta: float, chi: float, convention: str = HAMILTONIAN) -> Operator:
    convention = normalize_convention(convention)
    op = Operator(_ramsey_matrix(theta, chi, convention), (2,))
    err = op.unitarity_error()
    if err > 1e-10:
        raise ConventionError(
            f"printed Ramsey map is not unitary at theta={theta!r}, chi={chi!r} "
            f"(|U^dag U - I| = {err:.3g}); it is unitary only for chi = pi/2 mod pi"
        )
    return op


def ramsey_ket(theta: float, chi: float, convention: str = HAMILTONIAN) -> np.ndarray:
    """Image of |g> under a Ramsey pulse, i.e. preparing an atom that leaves the source in |g>.

    Only the |g> column is needed here, and it is normalized for every chi, so
    the printed convention can be used even where its full map is not unitary.
    """
    return _ramsey_matrix(theta, chi, normalize_convention(convention))[:, 0].copy()


def expm_oracle(generator: Operator, t: float) -> Operator:
    """exp(-i G t) for Hermitian G via eigendecomposition."""
    if not generator.is_hermitian(1e-12):
        raise ValueError("expm_oracle needs a Hermitian generator")
    w, v = np.linalg.eigh(generator.matrix)
    return Operator((v * np.exp(-1j * w * t)) @ v.conj().T, generator.dims)
