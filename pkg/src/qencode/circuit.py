"""Dense statevector simulation of small circuits.

Bit ordering is little-endian: qubit ``k`` is bit ``k`` of the basis index,
and kets print as ``q_{n-1} ... q_0``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .params import Angle, Expr, parse_angle

BASE_GATES = ("x", "h", "rx", "ry", "rz", "p", "cx", "cz")
ROTATIONS = ("rx", "ry", "rz")
PARAMETRIC = ("rx", "ry", "rz", "p")
ARITY = {"x": 1, "h": 1, "rx": 1, "ry": 1, "rz": 1, "p": 1, "cx": 2, "cz": 2}

NORM_TOL = 1e-10


class CircuitError(ValueError):
    pass


class UnboundParameterError(CircuitError, KeyError):
    def __init__(self, name: str):
        super().__init__(f"missing binding for parameter {name!r}")
        self.name = name

    def __str__(self) -> str:
        return self.args[0]


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.n_qubits:
            raise ValueError(f"expected {2 ** self.n_qubits} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("state contains non-finite amplitudes")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm:.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n_qubits: int) -> StateVector:
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def probabilities(self) -> np.ndarray:
        return probabilities(self)

    def ket(self, index: int) -> str:
        return "|" + format(index, f"0{self.n_qubits}b") + ">"

    def to_json(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_json(cls, pairs: Sequence[Sequence[float]]) -> StateVector:
        amps = np.array([complex(re, im) for re, im in pairs])
        n = int(round(np.log2(len(amps))))
        return cls(n, amps)


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


# ---------------------------------------------------------------------------
# gates and circuits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gate:
    kind: str
    angle: Angle | None = None

    def __post_init__(self):
        if self.kind not in BASE_GATES:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind in PARAMETRIC and self.angle is None:
            raise CircuitError(f"gate {self.kind} requires an angle")
        if self.kind not in PARAMETRIC and self.angle is not None:
            raise CircuitError(f"gate {self.kind} takes no angle")
        if isinstance(self.angle, (int, np.floating, np.integer)):
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def name(self) -> str:
        return self.kind

    @property
    def num_qubits(self) -> int:
        return ARITY[self.kind]

    @property
    def parameters(self) -> tuple[str, ...]:
        if isinstance(self.angle, Expr):
            return self.angle.parameters
        return ()


@dataclass(frozen=True)
class Block:
    """A named composite op; counts as a single op until decomposed."""

    name: str
    body: "Circuit"

    @property
    def num_qubits(self) -> int:
        return self.body.n_qubits

    @property
    def parameters(self) -> tuple[str, ...]:
        return self.body.parameters


Operation = Union[Gate, Block]


@dataclass(frozen=True)
class Instruction:
    op: Operation
    targets: tuple[int, ...]


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[Instruction, ...] = ()
    parameters: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        ops = tuple(self.ops)
        seen: dict[str, None] = {}
        for inst in ops:
            targets = tuple(int(t) for t in inst.targets)
            if len(targets) != inst.op.num_qubits:
                raise CircuitError(
                    f"{_op_name(inst.op)} acts on {inst.op.num_qubits} qubit(s), got targets {targets}"
                )
            if len(set(targets)) != len(targets):
                raise CircuitError(f"duplicate targets {targets}")
            if any(t < 0 or t >= self.n_qubits for t in targets):
                raise CircuitError(f"target out of range in {targets} for {self.n_qubits} qubits")
            for name in inst.op.parameters:
                seen.setdefault(name)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "parameters", tuple(seen))

    @property
    def num_parameters(self) -> int:
        return len(self.parameters)

    def append(self, op: Operation, targets: Iterable[int]) -> Circuit:
        return Circuit(self.n_qubits, self.ops + (Instruction(op, tuple(targets)),))

    def compose(self, other: Circuit, qubits: Sequence[int] | None = None,
                name: str | None = None) -> Circuit:
        """Append ``other``; as one labelled block when ``name`` is given."""
        qubits = tuple(range(other.n_qubits)) if qubits is None else tuple(qubits)
        if name is not None:
            return self.append(Block(name, other), qubits)
        remapped = tuple(
            Instruction(i.op, tuple(qubits[t] for t in i.targets)) for i in other.ops
        )
        return Circuit(self.n_qubits, self.ops + remapped)

    def __len__(self) -> int:
        return len(self.ops)


def _op_name(op: Operation) -> str:
    return op.name


class CircuitBuilder:
    """Mutable helper for assembling a :class:`Circuit` op by op."""

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self._ops: list[Instruction] = []

    def add(self, kind: str, *targets: int, angle: Angle | None = None) -> CircuitBuilder:
        self._ops.append(Instruction(Gate(kind, angle), tuple(targets)))
        return self

    def x(self, q):
        return self.add("x", q)

    def h(self, q):
        return self.add("h", q)

    def rx(self, angle, q):
        return self.add("rx", q, angle=angle)

    def ry(self, angle, q):
        return self.add("ry", q, angle=angle)

    def rz(self, angle, q):
        return self.add("rz", q, angle=angle)

    def p(self, angle, q):
        return self.add("p", q, angle=angle)

    def cx(self, control, target):
        return self.add("cx", control, target)

    def cz(self, a, b):
        return self.add("cz", a, b)

    def block(self, name: str, body: Circuit, qubits: Sequence[int] | None = None):
        qubits = tuple(range(body.n_qubits)) if qubits is None else tuple(qubits)
        self._ops.append(Instruction(Block(name, body), qubits))
        return self

    def build(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(self._ops))


# ---------------------------------------------------------------------------
# gate matrices
# ---------------------------------------------------------------------------

_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def gate_matrix(kind: str, angle=None) -> np.ndarray:
    """Unitary of a base gate.

    ``angle`` may be an array of shape ``(B,)``; the result then has shape
    ``(B, d, d)``. Two-qubit matrices index as ``2*b(first target) + b(second)``.
    """
    if kind == "x":
        return _X
    if kind == "h":
        return _H
    if kind == "cx":
        return _CX
    if kind == "cz":
        return _CZ
    if angle is None or isinstance(angle, Expr):
        raise CircuitError(f"gate {kind} needs a concrete angle")
    t = np.asarray(angle, dtype=float)
    c, s = np.cos(t / 2), np.sin(t / 2)
    zero = np.zeros_like(t)
    one = np.ones_like(t)
    if kind == "ry":
        m = [[c, -s], [s, c]]
    elif kind == "rx":
        m = [[c, -1j * s], [-1j * s, c]]
    elif kind == "rz":
        m = [[np.exp(-0.5j * t), zero], [zero, np.exp(0.5j * t)]]
    elif kind == "p":
        m = [[one, zero], [zero, np.exp(1j * t)]]
    else:
        raise CircuitError(f"unknown gate kind {kind!r}")
    out = np.array(m, dtype=complex)
    if out.ndim == 3:
        out = np.moveaxis(out, -1, 0)
    return out


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def _apply_matrix(psi: np.ndarray, mat: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Apply ``mat`` to ``targets`` of a batch of states ``psi`` (shape ``(B, 2**n)``)."""
    batch = psi.shape[0]
    k = len(targets)
    t = psi.reshape((batch,) + (2,) * n)
    # axis 1 is the most significant qubit (n-1)
    axes = [1 + (n - 1 - q) for q in targets]
    dest = list(range(n + 1 - k, n + 1))
    t = np.moveaxis(t, axes, dest)
    shape = t.shape
    flat = t.reshape(shape[: n + 1 - k] + (2**k,))
    if mat.ndim == 2:
        flat = flat @ mat.T
    else:
        flat = np.einsum("b...j,bij->b...i", flat, mat)
    t = np.moveaxis(flat.reshape(shape), dest, axes)
    return t.reshape(batch, 2**n)


def _resolve_angle(angle: Angle, bindings: Mapping[str, object]):
    if isinstance(angle, Expr):
        try:
            return angle.evaluate(bindings)
        except KeyError:
            missing = next(n for n in angle.parameters if n not in bindings)
            raise UnboundParameterError(missing) from None
    return angle


def evolve(circuit: Circuit, psi: np.ndarray, bindings: Mapping[str, object] | None = None,
           targets: Sequence[int] | None = None, n: int | None = None) -> np.ndarray:
    """Run ``circuit`` on a batch of states.

    ``psi`` has shape ``(B, 2**n)``. Binding values may be scalars or arrays of
    shape ``(B,)`` (one angle per batch member).
    """
    bindings = bindings or {}
    n = circuit.n_qubits if n is None else n
    qmap = tuple(range(circuit.n_qubits)) if targets is None else tuple(targets)
    for inst in circuit.ops:
        mapped = tuple(qmap[t] for t in inst.targets)
        op = inst.op
        if isinstance(op, Block):
            psi = evolve(op.body, psi, bindings, mapped, n)
            continue
        angle = _resolve_angle(op.angle, bindings) if op.angle is not None else None
        mat = gate_matrix(op.kind, angle)
        if mat.ndim == 3 and mat.shape[0] != psi.shape[0]:
            raise CircuitError("batched angle length does not match state batch")
        psi = _apply_matrix(psi, mat, mapped, n)
    return psi


def _check_bindings(circuit: Circuit, bindings: Mapping[str, object]) -> None:
    for name in circuit.parameters:
        if name not in bindings:
            raise UnboundParameterError(name)


def apply_gate(state: StateVector, gate: Gate, targets: Sequence[int]) -> StateVector:
    circ = Circuit(state.n_qubits, (Instruction(gate, tuple(targets)),))
    if circ.parameters:
        raise UnboundParameterError(circ.parameters[0])
    psi = evolve(circ, state.amplitudes[None, :].copy())
    return StateVector(state.n_qubits, psi[0])


def run(circuit: Circuit, bindings: Mapping[str, float] | None = None,
        initial: StateVector | None = None) -> StateVector:
    """Simulate ``circuit`` from ``|0...0>`` (or ``initial``)."""
    bindings = bindings or {}
    _check_bindings(circuit, bindings)
    if initial is None:
        psi = np.zeros((1, 2**circuit.n_qubits), dtype=complex)
        psi[0, 0] = 1.0
    else:
        psi = initial.amplitudes[None, :].copy()
    psi = evolve(circuit, psi, bindings)
    return StateVector(circuit.n_qubits, psi[0])


def run_batch(circuit: Circuit, bindings: Mapping[str, object]) -> np.ndarray:
    """Simulate a batch from ``|0...0>``; returns amplitudes of shape ``(B, 2**n)``."""
    _check_bindings(circuit, bindings)
    sizes = {np.size(v) for v in bindings.values() if np.ndim(v) > 0}
    if len(sizes) > 1:
        raise CircuitError(f"inconsistent batch sizes {sorted(sizes)}")
    batch = sizes.pop() if sizes else 1
    psi = np.zeros((batch, 2**circuit.n_qubits), dtype=complex)
    psi[:, 0] = 1.0
    return evolve(circuit, psi, bindings)


def unitary(circuit: Circuit, bindings: Mapping[str, float] | None = None) -> np.ndarray:
    bindings = bindings or {}
    _check_bindings(circuit, bindings)
    dim = 2**circuit.n_qubits
    cols = evolve(circuit, np.eye(dim, dtype=complex), bindings)
    return cols.T


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------


def bind(circuit: Circuit, values: Mapping[str, float]) -> Circuit:
    """Substitute concrete values for some or all symbolic parameters."""
    unknown = [k for k in values if k not in circuit.parameters]
    if unknown:
        raise CircuitError(f"unknown parameter(s): {', '.join(unknown)}")
    return _bind(circuit, values)


def _bind(circuit: Circuit, values: Mapping[str, float]) -> Circuit:
    ops = []
    for inst in circuit.ops:
        op = inst.op
        if isinstance(op, Block):
            op = Block(op.name, _bind(op.body, values))
        elif isinstance(op.angle, Expr):
            op = Gate(op.kind, op.angle.substitute(values))
        ops.append(Instruction(op, inst.targets))
    return Circuit(circuit.n_qubits, tuple(ops))


def decompose(circuit: Circuit) -> Circuit:
    """Expand every composite block (recursively) into base gates."""
    return Circuit(circuit.n_qubits, tuple(_flatten(circuit, tuple(range(circuit.n_qubits)))))


def _flatten(circuit: Circuit, qmap: tuple[int, ...]):
    for inst in circuit.ops:
        mapped = tuple(qmap[t] for t in inst.targets)
        if isinstance(inst.op, Block):
            yield from _flatten(inst.op.body, mapped)
        else:
            yield Instruction(inst.op, mapped)


@dataclass(frozen=True)
class CircuitStats:
    depth: int
    width: int
    num_parameters: int
    op_counts: dict[str, int]

    def as_tuple(self):
        return self.depth, self.width, self.num_parameters, list(self.op_counts.items())


def depth(circuit: Circuit) -> int:
    level = [0] * circuit.n_qubits
    for inst in circuit.ops:
        layer = max(level[q] for q in inst.targets) + 1
        for q in inst.targets:
            level[q] = layer
    return max(level, default=0)


def count_ops(circuit: Circuit) -> dict[str, int]:
    """Op counts, most frequent first (ties keep first-seen order)."""
    counts = Counter(inst.op.name.lower() for inst in circuit.ops)
    return dict(counts.most_common())


def stats(circuit: Circuit) -> CircuitStats:
    return CircuitStats(
        depth=depth(circuit),
        width=circuit.n_qubits,
        num_parameters=circuit.num_parameters,
        op_counts=count_ops(circuit),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _op_to_json(inst: Instruction) -> dict:
    op = inst.op
    if isinstance(op, Block):
        return {"kind": op.name, "targets": list(inst.targets),
                "ops": [_op_to_json(i) for i in op.body.ops]}
    out: dict = {"kind": op.kind, "targets": list(inst.targets)}
    if isinstance(op.angle, Expr):
        out["param"] = str(op.angle)
    elif op.angle is not None:
        out["angle"] = op.angle
    return out


def circuit_to_json(circuit: Circuit) -> dict:
    return {
        "n_qubits": circuit.n_qubits,
        "ops": [_op_to_json(i) for i in circuit.ops],
        "params": list(circuit.parameters),
    }


def _op_from_json(obj: Mapping, n_qubits: int) -> Instruction:
    targets = tuple(obj["targets"])
    if "ops" in obj:
        body = Circuit(len(targets), tuple(_op_from_json(o, len(targets)) for o in obj["ops"]))
        return Instruction(Block(obj["kind"], body), targets)
    if "param" in obj:
        angle = parse_angle(obj["param"])
    else:
        angle = obj.get("angle")
    return Instruction(Gate(obj["kind"], angle), targets)


def circuit_from_json(obj: Mapping) -> Circuit:
    n = int(obj["n_qubits"])
    circ = Circuit(n, tuple(_op_from_json(o, n) for o in obj["ops"]))
    declared = list(obj.get("params", circ.parameters))
    if declared != list(circ.parameters):
        raise CircuitError(f"declared params {declared} do not match ops {list(circ.parameters)}")
    return circ


def dumps(circuit: Circuit, **kwargs) -> str:
    return json.dumps(circuit_to_json(circuit), **kwargs)


def loads(text: str) -> Circuit:
    return circuit_from_json(json.loads(text))
