"""Parameterized circuit families used by the classifier."""

from __future__ import annotations

import math
from typing import Literal

from .circuit import Circuit, CircuitBuilder
from .params import parameter_vector

Entanglement = Literal["linear", "reverse_linear", "full"]

ZZ_BLOCK = "zz_feature_map"
ANSATZ_BLOCK = "real_amplitudes"
HYBRID_BLOCK = "hybrid_feature_map"


def entangler_pairs(n_qubits: int, ent: Entanglement = "linear") -> list[tuple[int, int]]:
    if ent == "linear":
        return [(i, i + 1) for i in range(n_qubits - 1)]
    if ent == "reverse_linear":
        # same pairs as linear, emitted last-to-first
        return [(i, i + 1) for i in range(n_qubits - 2, -1, -1)]
    if ent == "full":
        return [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    raise ValueError(f"unknown entanglement scheme {ent!r}")


def build_zz_feature_map(n_qubits: int, reps: int = 2, ent: Entanglement = "linear",
                         prefix: str = "x") -> Circuit:
    """H layer, P(2 x_i), then CX-P(2(pi-x_i)(pi-x_j))-CX per pair, repeated."""
    if n_qubits < 2:
        raise ValueError("ZZ feature map needs at least 2 qubits")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    x = parameter_vector(prefix, n_qubits)
    pairs = entangler_pairs(n_qubits, ent)
    b = CircuitBuilder(n_qubits)
    for _ in range(reps):
        for q in range(n_qubits):
            b.h(q)
        for q in range(n_qubits):
            b.p(2.0 * x[q], q)
        for i, j in pairs:
            b.cx(i, j)
            b.p(2.0 * (math.pi - x[i]) * (math.pi - x[j]), j)
            b.cx(i, j)
    return b.build()


def build_real_amplitudes(n_qubits: int, reps: int = 2, ent: Entanglement = "linear",
                          prefix: str = "theta") -> Circuit:
    """RY layer, then ``reps`` times (CX entangler, RY layer)."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    theta = iter(parameter_vector(prefix, (reps + 1) * n_qubits))
    pairs = entangler_pairs(n_qubits, ent) if n_qubits > 1 else []
    b = CircuitBuilder(n_qubits)
    for q in range(n_qubits):
        b.ry(next(theta), q)
    for _ in range(reps):
        for i, j in pairs:
            b.cx(i, j)
        for q in range(n_qubits):
            b.ry(next(theta), q)
    return b.build()


def build_hybrid_feature_map(n_qubits: int, prefix: str = "x") -> Circuit:
    """RY(x_i) then RZ(x_i) on every qubit."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    x = parameter_vector(prefix, n_qubits)
    b = CircuitBuilder(n_qubits)
    for q in range(n_qubits):
        b.ry(x[q], q)
    for q in range(n_qubits):
        b.rz(x[q], q)
    return b.build()


def build_vqc_circuit(feature_map: Circuit, ansatz: Circuit, feature_name: str = ZZ_BLOCK,
                      ansatz_name: str = ANSATZ_BLOCK) -> Circuit:
    """Feature map and ansatz, each wrapped as one labelled block."""
    if feature_map.n_qubits != ansatz.n_qubits:
        raise ValueError("feature map and ansatz widths differ")
    b = CircuitBuilder(feature_map.n_qubits)
    b.block(feature_name, feature_map)
    b.block(ansatz_name, ansatz)
    return b.build()


def standard_vqc_circuit(n_qubits: int = 6, reps: int = 2, ent: Entanglement = "linear",
                         ansatz_ent: Entanglement | None = None) -> Circuit:
    """ZZ feature map + real-amplitudes ansatz.

    ``ansatz_ent`` defaults to ``ent``. ``ansatz_ent="reverse_linear"`` keeps the
    gate counts and changes only the CX order, which moves the decomposed depth
    from 32 to 35 for the 6-qubit, reps=2 circuit.
    """
    return build_vqc_circuit(build_zz_feature_map(n_qubits, reps, ent),
                             build_real_amplitudes(n_qubits, reps, ansatz_ent or ent))


def hybrid_vqc_circuit(n_qubits: int = 6, reps: int = 2, ent: Entanglement = "linear") -> Circuit:
    return build_vqc_circuit(build_hybrid_feature_map(n_qubits),
                             build_real_amplitudes(n_qubits, reps, ent),
                             feature_name=HYBRID_BLOCK)
