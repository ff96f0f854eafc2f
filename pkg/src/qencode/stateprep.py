"""Real-amplitude state preparation with uniformly controlled RY rotations.

The target is split as a binary tree from the most significant qubit down.
Each tree level is one uniformly controlled RY, which is expanded into
alternating RY and CX gates along a Gray-code sequence of controls.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, CircuitBuilder

ZERO_CUTOFF = 1e-12


def gray_code(i: int) -> int:
    return i ^ (i >> 1)


def _popcount(v: int) -> int:
    return bin(v).count("1")


def uniform_rotation_angles(alphas: np.ndarray) -> np.ndarray:
    """Convert per-control-value angles into the Gray-code RY angles.

    With ``m`` controls, control value ``j`` sees the net rotation
    ``sum_i (-1)**popcount(j & gray(i)) * theta_i``.
    """
    size = len(alphas)
    signs = np.array(
        [[(-1) ** _popcount(j & gray_code(i)) for i in range(size)] for j in range(size)],
        dtype=float,
    )
    return signs.T @ alphas / size


def _control_sequence(m: int) -> list[int]:
    """Index (into the control list) of the CX after each RY."""
    seq = []
    size = 2**m
    for i in range(size):
        changed = gray_code(i) ^ gray_code((i + 1) % size)
        seq.append(changed.bit_length() - 1)
    return seq


def append_uniformly_controlled_ry(builder: CircuitBuilder, alphas, target: int,
                                   controls: list[int]) -> None:
    """RY(alphas[j]) on ``target`` when ``controls`` read ``j`` (controls[0] is the low bit)."""
    alphas = np.asarray(alphas, dtype=float)
    m = len(controls)
    if len(alphas) != 2**m:
        raise ValueError("need one angle per control value")
    if m == 0:
        if abs(alphas[0]) > ZERO_CUTOFF:
            builder.ry(float(alphas[0]), target)
        return
    thetas = uniform_rotation_angles(alphas)
    for theta, ctl in zip(thetas, _control_sequence(m)):
        if abs(theta) > ZERO_CUTOFF:
            builder.ry(float(theta), target)
        builder.cx(controls[ctl], target)


def _check_target(target) -> np.ndarray:
    amps = np.asarray(target, dtype=float).reshape(-1)
    size = amps.size
    if size < 2 or size & (size - 1):
        raise ValueError(f"target length must be a power of two >= 2, got {size}")
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("zero vector cannot be prepared")
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"target is not normalized (norm {norm:.12g})")
    return np.where(np.abs(amps) < ZERO_CUTOFF, 0.0, amps)


def prepare_state(target) -> Circuit:
    """Circuit mapping ``|0...0>`` to the real, unit-norm ``target``.

    Negative amplitudes are carried by the leaf rotations, whose angles come
    from ``atan2`` and so range over a full turn.
    """
    amps = _check_target(target)
    n = int(np.log2(amps.size))
    builder = CircuitBuilder(n)
    for t in range(n - 1, -1, -1):
        controls = list(range(t + 1, n))
        groups = amps.reshape(2 ** (n - 1 - t), 2, 2**t)
        if t == 0:
            alphas = 2 * np.arctan2(groups[:, 1, 0], groups[:, 0, 0])
        else:
            lower = np.linalg.norm(groups[:, 0, :], axis=1)
            upper = np.linalg.norm(groups[:, 1, :], axis=1)
            alphas = 2 * np.arctan2(upper, lower)
        append_uniformly_controlled_ry(builder, alphas, t, controls)
    return builder.build()
