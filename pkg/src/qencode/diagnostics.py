"""Entanglement diagnostics for pure states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuit import StateVector

EIG_CUTOFF = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    qubits: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    part_a: tuple[int, ...]
    part_b: tuple[int, ...]


def _split(n: int, subset: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a = tuple(sorted(set(int(q) for q in subset)))
    if not a or len(a) >= n:
        raise ValueError("subset must be a nonempty proper subset of the qubits")
    if a[0] < 0 or a[-1] >= n:
        raise ValueError(f"qubit index out of range for {n} qubits")
    b = tuple(q for q in range(n) if q not in a)
    return a, b


def _bipartite_matrix(state: StateVector, part_a, part_b) -> np.ndarray:
    """Amplitudes as a |A| x |B| matrix, each side indexed little-endian."""
    n = state.n_qubits
    t = state.amplitudes.reshape((2,) * n)
    # tensor axis (n-1-q) holds qubit q; order each side most significant first
    axes = [n - 1 - q for q in reversed(part_a)] + [n - 1 - q for q in reversed(part_b)]
    return np.transpose(t, axes).reshape(2 ** len(part_a), 2 ** len(part_b))


def partial_trace(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (lowest kept qubit = least significant bit)."""
    keep_q, rest = _split(state.n_qubits, keep)
    m = _bipartite_matrix(state, keep_q, rest)
    return DensityMatrix(m @ m.conj().T, keep_q)


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def purity(rho) -> float:
    m = _as_matrix(rho)
    return float(np.real(np.trace(m @ m)))


def entropy_from_probabilities(weights) -> float:
    w = np.asarray(weights, dtype=float)
    w = w[w > EIG_CUTOFF]
    return max(0.0, float(-np.sum(w * np.log2(w))))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits."""
    return entropy_from_probabilities(np.linalg.eigvalsh(_as_matrix(rho)))


def schmidt_decompose(state: StateVector, part_a: Iterable[int]) -> SchmidtDecomposition:
    a, b = _split(state.n_qubits, part_a)
    s = np.linalg.svd(_bipartite_matrix(state, a, b), compute_uv=False)
    return SchmidtDecomposition(np.sort(s)[::-1], a, b)


def bloch_vector(state: StateVector, qubit: int) -> tuple[float, float, float]:
    if not 0 <= qubit < state.n_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    if state.n_qubits == 1:
        m = np.outer(state.amplitudes, state.amplitudes.conj())
    else:
        m = partial_trace(state, [qubit]).matrix
    return tuple(float(np.real(np.trace(m @ p))) for p in (PAULI_X, PAULI_Y, PAULI_Z))


def report(state: StateVector, part_a: Iterable[int] = (0,)) -> dict:
    """Purity, entropy and Schmidt data for one bipartition, plus every Bloch vector."""
    rho = partial_trace(state, part_a)
    schmidt = schmidt_decompose(state, part_a)
    return {
        "bipartition": [list(schmidt.part_a), list(schmidt.part_b)],
        "purity": purity(rho),
        "entropy_bits": von_neumann_entropy(rho),
        "schmidt_coefficients": [float(c) for c in schmidt.coefficients],
        "bloch_vectors": [list(bloch_vector(state, q)) for q in range(state.n_qubits)],
    }
