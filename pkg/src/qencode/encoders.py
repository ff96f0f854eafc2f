"""Classical-to-quantum encodings of a single feature vector."""

from __future__ import annotations

import math
from typing import Literal

import numpy as np

from .circuit import Circuit, CircuitBuilder, bind
from .stateprep import prepare_state
from .varforms import build_hybrid_feature_map

EncodingMethod = Literal["basis", "amplitude", "angle", "phase", "hybrid"]
METHODS: tuple[str, ...] = ("basis", "amplitude", "angle", "phase", "hybrid")


def _features(x) -> np.ndarray:
    values = np.asarray(x, dtype=float).reshape(-1)
    if values.size < 1:
        raise ValueError("feature vector is empty")
    if not np.all(np.isfinite(values)):
        raise ValueError("feature vector contains non-finite values")
    return values


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def amplitude_qubits(n_features: int) -> int:
    return max(1, math.ceil(math.log2(n_features)))


def required_qubits(method: EncodingMethod, n_features: int) -> int:
    if n_features < 1:
        raise ValueError("n_features must be >= 1")
    if method == "amplitude":
        return amplitude_qubits(n_features)
    if method == "hybrid" and is_power_of_two(n_features):
        return amplitude_qubits(n_features)
    if method in METHODS:
        return n_features
    raise ValueError(f"unknown encoding method {method!r}")


def basis_encode(x, threshold: float = 0.0) -> Circuit:
    """X on qubit i wherever x_i exceeds ``threshold``."""
    values = _features(x)
    b = CircuitBuilder(values.size)
    for q, v in enumerate(values):
        if v > threshold:
            b.x(q)
    return b.build()


def angle_encode(x) -> Circuit:
    values = _features(x)
    b = CircuitBuilder(values.size)
    for q, v in enumerate(values):
        b.ry(float(v), q)
    return b.build()


def phase_encode(x) -> Circuit:
    # H first: RZ on |0> alone is only a global phase
    values = _features(x)
    b = CircuitBuilder(values.size)
    for q in range(values.size):
        b.h(q)
    for q, v in enumerate(values):
        b.rz(float(v), q)
    return b.build()


def amplitude_encode(x) -> Circuit:
    """Zero-pad to a power of two, normalize, and prepare the resulting state."""
    values = _features(x)
    norm = np.linalg.norm(values)
    if norm == 0:
        raise ValueError("zero vector cannot be amplitude encoded")
    n = amplitude_qubits(values.size)
    padded = np.zeros(2**n)
    padded[: values.size] = values / norm
    return prepare_state(padded)


def hybrid_encode(x) -> Circuit:
    """Amplitude path for power-of-two lengths, RY+RZ rotations otherwise."""
    values = _features(x)
    if is_power_of_two(values.size):
        return amplitude_encode(values)
    fmap = build_hybrid_feature_map(values.size)
    return bind(fmap, {f"x[{i}]": float(v) for i, v in enumerate(values)})


ENCODERS = {
    "basis": basis_encode,
    "amplitude": amplitude_encode,
    "angle": angle_encode,
    "phase": phase_encode,
    "hybrid": hybrid_encode,
}


def encode(method: EncodingMethod, x) -> Circuit:
    try:
        fn = ENCODERS[method]
    except KeyError:
        raise ValueError(f"unknown encoding method {method!r}") from None
    return fn(x)
