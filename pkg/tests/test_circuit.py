import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qencode.circuit import (BASE_GATES, Block, Circuit, CircuitBuilder, CircuitError, Gate,
                             Instruction, StateVector, UnboundParameterError, apply_gate, bind,
                             circuit_from_json, circuit_to_json, decompose, depth, dumps,
                             gate_matrix, loads, probabilities, run, stats, unitary)
from qencode.params import Parameter
from qencode.varforms import build_hybrid_feature_map, standard_vqc_circuit

SQ2 = 1 / math.sqrt(2)


# -- gates ------------------------------------------------------------------


@pytest.mark.parametrize("kind", BASE_GATES)
@pytest.mark.parametrize("angle", [0.0, 0.3, -2.1, math.pi, 5.9])
def test_base_gates_are_unitary(kind, angle):
    m = gate_matrix(kind, angle if kind in ("rx", "ry", "rz", "p") else None)
    np.testing.assert_allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-12)


def test_matrix_conventions():
    t = 0.7
    c, s = math.cos(t / 2), math.sin(t / 2)
    np.testing.assert_allclose(gate_matrix("ry", t), [[c, -s], [s, c]])
    np.testing.assert_allclose(gate_matrix("rx", t), [[c, -1j * s], [-1j * s, c]])
    np.testing.assert_allclose(gate_matrix("rz", t), np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)]))
    np.testing.assert_allclose(gate_matrix("p", t), np.diag([1, np.exp(1j * t)]))


def test_batched_matrix_shape():
    m = gate_matrix("ry", np.array([0.0, math.pi]))
    assert m.shape == (2, 2, 2)
    np.testing.assert_allclose(m[1], [[0, -1], [1, 0]], atol=1e-15)


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("ry")
    with pytest.raises(CircuitError):
        Gate("h", 0.3)
    with pytest.raises(CircuitError):
        Gate("swap")


# -- apply_gate ---------------------------------------------------------------


def test_hadamard_on_zero():
    out = apply_gate(StateVector.zero(1), Gate("h"), [0])
    np.testing.assert_allclose(out.amplitudes, [SQ2, SQ2])


def test_ry_pi_flips():
    out = apply_gate(StateVector.zero(1), Gate("ry", math.pi), [0])
    np.testing.assert_allclose(out.amplitudes, [0, 1], atol=1e-15)


def test_cx_little_endian_truth_table():
    # index 1: q0 = 1, q1 = 0
    state = StateVector(2, [0, 1, 0, 0])
    out = apply_gate(state, Gate("cx"), [0, 1])
    np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1])


@pytest.mark.parametrize("targets", [[2], [0, 0], [-1]])
def test_apply_gate_bad_targets(targets):
    kind = "cx" if len(targets) == 2 else "x"
    with pytest.raises(CircuitError):
        apply_gate(StateVector.zero(2), Gate(kind), targets)


def test_apply_gate_unbound():
    with pytest.raises(UnboundParameterError):
        apply_gate(StateVector.zero(1), Gate("ry", Parameter("t")), [0])


@given(n=st.integers(1, 5), data=st.data())
def test_x_maps_index_to_xor(n, data):
    k = data.draw(st.integers(0, n - 1))
    i = data.draw(st.integers(0, 2**n - 1))
    amps = np.zeros(2**n)
    amps[i] = 1
    out = apply_gate(StateVector(n, amps), Gate("x"), [k])
    assert np.argmax(np.abs(out.amplitudes)) == i ^ (1 << k)


# -- run ------------------------------------------------------------------------


def test_run_empty_circuit():
    np.testing.assert_allclose(run(Circuit(3)).amplitudes, [1, 0, 0, 0, 0, 0, 0, 0])


def test_run_single_rotation():
    circ = CircuitBuilder(1).ry(Parameter("t"), 0).build()
    out = run(circ, {"t": math.pi / 2})
    np.testing.assert_allclose(out.amplitudes, [math.cos(math.pi / 4), math.sin(math.pi / 4)])


def test_run_reports_missing_binding():
    circ = CircuitBuilder(2).ry(Parameter("alpha"), 0).rz(Parameter("beta"), 1).build()
    with pytest.raises(UnboundParameterError) as info:
        run(circ, {"alpha": 1.0})
    assert info.value.name == "beta"


def test_probabilities_examples():
    assert probabilities(StateVector.zero(1)).tolist() == [1.0, 0.0]
    uniform = run(CircuitBuilder(2).h(0).h(1).build())
    np.testing.assert_allclose(probabilities(uniform), [0.25] * 4)


def test_state_rejects_unnormalized():
    with pytest.raises(ValueError):
        StateVector(1, [1, 1])
    with pytest.raises(ValueError):
        StateVector(1, [np.nan, 1])
    with pytest.raises(ValueError):
        StateVector(2, [1, 0])


def test_state_is_read_only():
    s = StateVector.zero(1)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


# -- random circuits ------------------------------------------------------------

ONE_Q = ["x", "h", "rx", "ry", "rz", "p"]


@st.composite
def random_circuits(draw, max_qubits=4, max_ops=12, with_blocks=True):
    n = draw(st.integers(2, max_qubits))

    def gates(k):
        b = CircuitBuilder(n)
        for _ in range(k):
            kind = draw(st.sampled_from(ONE_Q + ["cx", "cz"]))
            if kind in ("cx", "cz"):
                a = draw(st.integers(0, n - 1))
                c = draw(st.integers(0, n - 1).filter(lambda v: v != a))
                b.add(kind, a, c)
            elif kind in ("rx", "ry", "rz", "p"):
                b.add(kind, draw(st.integers(0, n - 1)),
                      angle=draw(st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)))
            else:
                b.add(kind, draw(st.integers(0, n - 1)))
        return b.build()

    outer = CircuitBuilder(n)
    for part in range(draw(st.integers(1, 3))):
        body = gates(draw(st.integers(0, max_ops)))
        if with_blocks and draw(st.booleans()):
            outer.block(f"blk{part}", body)
        else:
            for inst in body.ops:
                outer._ops.append(inst)
    return outer.build()


@settings(max_examples=60, deadline=None)
@given(circ=random_circuits())
def test_norm_preserved(circ):
    out = run(circ)
    assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1) < 1e-10


@settings(max_examples=60, deadline=None)
@given(circ=random_circuits())
def test_decompose_commutes_with_run(circ):
    flat = decompose(circ)
    assert all(not isinstance(i.op, Block) for i in flat.ops)
    np.testing.assert_allclose(run(flat).amplitudes, run(circ).amplitudes, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(circ=random_circuits(with_blocks=False), q=st.integers(0, 3))
def test_depth_monotone_under_append(circ, q):
    before = depth(circ)
    after = depth(circ.append(Gate("h"), [q % circ.n_qubits]))
    assert after >= before


def test_parallel_op_on_fresh_qubit_keeps_depth():
    circ = CircuitBuilder(3).h(0).cx(0, 1).build()
    assert depth(circ.append(Gate("x"), [2])) == depth(circ) == 2


def test_unitary_matches_run():
    circ = CircuitBuilder(2).h(0).cx(0, 1).ry(0.4, 1).build()
    u = unitary(circ)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(u[:, 0], run(circ).amplitudes, atol=1e-12)


# -- bind / stats ---------------------------------------------------------------


def test_bind_nothing_is_identity():
    circ = standard_vqc_circuit()
    same = bind(circ, {})
    assert same == circ and same.num_parameters == 24


def test_bind_feature_map_to_concrete():
    fmap = build_hybrid_feature_map(6)
    bound = bind(fmap, {f"x[{i}]": 0.1 * i for i in range(6)})
    s = stats(bound)
    assert s.num_parameters == 0
    assert s.op_counts == {"ry": 6, "rz": 6}


def test_bind_six_of_twenty_four():
    circ = standard_vqc_circuit()
    bound = bind(circ, {f"x[{i}]": 0.5 for i in range(6)})
    assert bound.num_parameters == 18
    assert bound.parameters == circ.parameters[6:]


def test_bind_unknown_name():
    with pytest.raises(CircuitError, match="nope"):
        bind(build_hybrid_feature_map(2), {"nope": 1.0})


def test_stats_examples():
    s = stats(Circuit(6))
    assert (s.depth, s.width, s.num_parameters, s.op_counts) == (0, 6, 0, {})
    top = stats(standard_vqc_circuit())
    assert (top.depth, top.width, top.num_parameters) == (2, 6, 24)
    assert list(top.op_counts.items()) == [("zz_feature_map", 1), ("real_amplitudes", 1)]


def test_decompose_plain_circuit_unchanged():
    circ = CircuitBuilder(2).h(0).cx(0, 1).build()
    assert decompose(circ) == circ


# -- serialization --------------------------------------------------------------


def test_json_round_trip_symbolic():
    circ = standard_vqc_circuit(3, 1)
    doc = circuit_to_json(circ)
    assert set(doc) == {"n_qubits", "ops", "params"}
    back = circuit_from_json(doc)
    assert back.parameters == circ.parameters
    vals = {name: 0.1 + 0.05 * i for i, name in enumerate(circ.parameters)}
    np.testing.assert_allclose(run(back, vals).amplitudes, run(circ, vals).amplitudes, atol=1e-12)
    assert loads(dumps(circ)).parameters == circ.parameters


def test_json_concrete_gate_fields():
    circ = CircuitBuilder(1).ry(0.25, 0).h(0).build()
    ops = circuit_to_json(circ)["ops"]
    assert ops[0] == {"kind": "ry", "targets": [0], "angle": 0.25}
    assert ops[1] == {"kind": "h", "targets": [0]}


def test_statevector_json_round_trip():
    s = run(CircuitBuilder(2).h(0).rz(0.3, 0).cx(0, 1).build())
    pairs = s.to_json()
    assert all(len(p) == 2 for p in pairs)
    np.testing.assert_allclose(StateVector.from_json(pairs).amplitudes, s.amplitudes)


def test_circuit_rejects_bad_targets():
    with pytest.raises(CircuitError):
        Circuit(2, (Instruction(Gate("x"), (2,)),))
