"""Statevector simulation, data encodings and a variational quantum classifier."""

from .circuit import (Circuit, CircuitBuilder, Gate, StateVector, apply_gate, bind, decompose,
                      probabilities, run, stats)
from .encoders import (amplitude_encode, angle_encode, basis_encode, encode, hybrid_encode,
                       phase_encode, required_qubits)
from .stateprep import prepare_state

__version__ = "0.1.0"

__all__ = [
    "Circuit", "CircuitBuilder", "Gate", "StateVector", "apply_gate", "bind", "decompose",
    "probabilities", "run", "stats", "amplitude_encode", "angle_encode", "basis_encode", "encode",
    "hybrid_encode", "phase_encode", "required_qubits", "prepare_state",
]
