import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qencode.circuit import BASE_GATES, CircuitBuilder, decompose, run, unitary
from qencode.stateprep import append_uniformly_controlled_ry, gray_code, prepare_state

from conftest import AMPLITUDE_SAMPLE


def _ry(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]])


def test_gray_code_neighbours_differ_by_one_bit():
    for i in range(64):
        assert bin(gray_code(i) ^ gray_code(i + 1)).count("1") == 1


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_uniformly_controlled_ry_matches_block_diagonal(m, rng):
    # oracle: explicit multiplexor built by enumerating control values
    alphas = rng.uniform(-math.pi, math.pi, 2**m)
    n = m + 1
    b = CircuitBuilder(n)
    append_uniformly_controlled_ry(b, alphas, 0, list(range(1, n)))
    expected = np.zeros((2**n, 2**n))
    for j in range(2**m):
        rot = _ry(alphas[j])
        for a in range(2):
            for c in range(2):
                expected[(j << 1) | a, (j << 1) | c] = rot[a, c]
    np.testing.assert_allclose(unitary(b.build()), expected, atol=1e-12)


def test_single_qubit_examples():
    assert np.allclose(run(prepare_state([1, 0])).amplitudes, [1, 0])
    out = run(prepare_state([1 / math.sqrt(2), 1 / math.sqrt(2)]))
    np.testing.assert_allclose(out.amplitudes, [1 / math.sqrt(2)] * 2, atol=1e-10)
    ops = prepare_state([1 / math.sqrt(2), 1 / math.sqrt(2)]).ops
    assert len(ops) == 1 and ops[0].op.kind == "ry"
    assert math.isclose(float(ops[0].op.angle), math.pi / 2)


def test_sample_vector_reproduced():
    target = np.append(AMPLITUDE_SAMPLE, [0.0, 0.0])
    out = run(prepare_state(np.array(target) / np.linalg.norm(target)))
    np.testing.assert_allclose(out.amplitudes.real, target, atol=1e-3)
    assert np.abs(out.amplitudes.imag).max() < 1e-12


@pytest.mark.parametrize("bad", [[1, 0, 0], [0, 0], [0.6, 0.6], [1.0]])
def test_rejects_invalid_targets(bad):
    with pytest.raises(ValueError):
        prepare_state(bad)


@pytest.mark.parametrize("size", [2, 4, 8, 16])
def test_round_trip_fidelity_many(size):
    rng = np.random.default_rng(size)
    for _ in range(250):  # 4 sizes x 250 = 1000 vectors
        v = rng.standard_normal(size)
        v /= np.linalg.norm(v)
        circ = prepare_state(v)
        fid = abs(np.vdot(v, run(circ).amplitudes)) ** 2
        assert fid >= 1 - 1e-10
        k = int(math.log2(size))
        assert len(decompose(circ).ops) <= 4 * 2**k
        assert all(inst.op.kind in BASE_GATES for inst in circ.ops)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=8, max_size=8).filter(lambda v: sum(v) > 1e-3))
def test_nonnegative_targets_give_nonnegative_amplitudes(values):
    v = np.array(values)
    v /= np.linalg.norm(v)
    out = run(prepare_state(v)).amplitudes
    assert np.abs(out.imag).max() <= 1e-9
    assert out.real.min() >= -1e-9
    np.testing.assert_allclose(out.real, v, atol=1e-9)


def test_sparse_target_uses_fewer_rotations():
    circ = prepare_state([0, 0, 0, 0, 0, 0, 0, 1])
    np.testing.assert_allclose(run(circ).amplitudes, np.eye(8)[7], atol=1e-10)
