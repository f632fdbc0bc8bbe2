"""Exact state-vector simulation of a cavity-QED quantum delayed-choice experiment."""

from qdce.errors import NumericalInvariantError
from qdce.hilbert import Operator, StateVector, TwoQubitDensity
from qdce.protocol import ProtocolParams, final_two_atom_state, fit_phase_mapping, run_protocol

__all__ = [
    "NumericalInvariantError",
    "Operator",
    "ProtocolParams",
    "StateVector",
    "TwoQubitDensity",
    "final_two_atom_state",
    "fit_phase_mapping",
    "run_protocol",
]
