"""Variational quantum classifier with parity readout.

The feature map depends only on the data and the ansatz only on the
weights. Training therefore simulates the feature states once, and each
loss evaluation applies a single ansatz unitary to the whole batch.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Literal, Optional

import numpy as np

from . import varforms
from .circuit import Block, Circuit, ROTATIONS, decompose, evolve, run_batch
from .data import Dataset, ScalerParams
from .optimize import (NonFiniteObjectiveError, OptimizerResult, minimize_cobyla,
                       minimize_lbfgsb)
from .params import Expr

log = logging.getLogger(__name__)

PROB_FLOOR = 1e-10
FeatureMapKind = Literal["hybrid", "zz"]
OptimizerName = Literal["cobyla", "lbfgsb"]


def odd_parity_mask(n_qubits: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    parity = np.zeros_like(idx)
    for q in range(n_qubits):
        parity ^= (idx >> q) & 1
    return parity.astype(bool)


@dataclass(frozen=True, eq=False)
class VqcModel:
    feature_map: Circuit
    ansatz: Circuit
    theta: np.ndarray
    scaler: Optional[ScalerParams] = None
    feature_map_name: str = varforms.ZZ_BLOCK

    def __post_init__(self):
        if self.feature_map.n_qubits != self.ansatz.n_qubits:
            raise ValueError("feature map and ansatz must have the same width")
        theta = np.asarray(self.theta, dtype=float).reshape(-1)
        if theta.size != self.ansatz.num_parameters:
            raise ValueError(f"theta has {theta.size} entries, ansatz needs {self.ansatz.num_parameters}")
        object.__setattr__(self, "theta", theta)

    @property
    def n_qubits(self) -> int:
        return self.ansatz.n_qubits

    @property
    def n_features(self) -> int:
        return self.feature_map.num_parameters

    @property
    def circuit(self) -> Circuit:
        return varforms.build_vqc_circuit(self.feature_map, self.ansatz,
                                          feature_name=self.feature_map_name)

    def with_theta(self, theta) -> VqcModel:
        return replace(self, theta=np.asarray(theta, dtype=float))

    def theta_bindings(self, theta=None) -> dict[str, float]:
        theta = self.theta if theta is None else theta
        return dict(zip(self.ansatz.parameters, (float(t) for t in theta)))


def make_model(feature_map: FeatureMapKind = "hybrid", n_qubits: int = 6, reps: int = 2,
               entanglement: varforms.Entanglement = "linear", theta=None,
               scaler: Optional[ScalerParams] = None) -> VqcModel:
    if feature_map == "hybrid":
        fmap, name = varforms.build_hybrid_feature_map(n_qubits), varforms.HYBRID_BLOCK
    elif feature_map == "zz":
        fmap, name = varforms.build_zz_feature_map(n_qubits, reps, entanglement), varforms.ZZ_BLOCK
    else:
        raise ValueError(f"unknown feature map {feature_map!r}")
    ansatz = varforms.build_real_amplitudes(n_qubits, reps, entanglement)
    if theta is None:
        theta = np.zeros(ansatz.num_parameters)
    return VqcModel(fmap, ansatz, theta, scaler, name)


# ---------------------------------------------------------------------------
# forward pass
# ---------------------------------------------------------------------------


def _check_features(model: VqcModel, x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {x.shape[1]}")
    return x


def feature_states(model: VqcModel, x) -> np.ndarray:
    """Feature-map output states, shape ``(B, 2**n)``."""
    x = _check_features(model, x)
    bindings = {name: x[:, i] for i, name in enumerate(model.feature_map.parameters)}
    return run_batch(model.feature_map, bindings)


def _flat_ansatz(model: VqcModel):
    return decompose(model.ansatz).ops


def ansatz_unitary(model: VqcModel, theta=None, shift: Optional[tuple[int, float]] = None) -> np.ndarray:
    """Unitary of the bound ansatz; ``shift=(op_index, delta)`` offsets one gate angle."""
    bindings = model.theta_bindings(theta)
    dim = 2**model.n_qubits
    psi = np.eye(dim, dtype=complex)
    ops = _flat_ansatz(model)
    if shift is None:
        psi = evolve(Circuit(model.n_qubits, ops), psi, bindings)
    else:
        index, delta = shift
        before = Circuit(model.n_qubits, ops[:index])
        inst = ops[index]
        moved = Circuit(model.n_qubits, ops[index:index + 1])
        after = Circuit(model.n_qubits, ops[index + 1:])
        psi = evolve(before, psi, bindings)
        angle = inst.op.angle.evaluate(bindings) + delta
        psi = evolve(moved, psi, {**bindings, inst.op.angle.args[0]: angle})
        psi = evolve(after, psi, bindings)
    return psi.T


def _p1(states: np.ndarray, unitary: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = states @ unitary.T
    probs = np.abs(out) ** 2
    return probs[:, mask].sum(axis=1)


def class_probabilities(model: VqcModel, x, theta=None) -> np.ndarray:
    """Rows of ``(p0, p1)``; p1 is the odd-parity probability."""
    states = feature_states(model, x)
    p1 = _p1(states, ansatz_unitary(model, theta), odd_parity_mask(model.n_qubits))
    return np.column_stack([1.0 - p1, p1])


def forward(model: VqcModel, x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("forward takes a single feature vector")
    p0, p1 = class_probabilities(model, x[None, :])[0]
    return float(p0), float(p1)


# ---------------------------------------------------------------------------
# loss and gradient
# ---------------------------------------------------------------------------


def shift_occurrences(model: VqcModel) -> list[list[int]]:
    """For each ansatz parameter, the flat op indices where it appears as a bare rotation angle."""
    where: dict[str, list[int]] = {name: [] for name in model.ansatz.parameters}
    for i, inst in enumerate(_flat_ansatz(model)):
        op = inst.op
        if isinstance(op, Block) or not isinstance(op.angle, Expr):
            continue
        names = op.angle.parameters
        if op.kind not in ROTATIONS:
            raise ValueError(f"parameter {names[0]!r} drives a {op.kind} gate; the shift rule needs RX/RY/RZ")
        if not op.angle.is_symbol:
            raise ValueError(f"parameter {names[0]!r} enters through an expression; shift rule needs a bare angle")
        where[names[0]].append(i)
    return [where[name] for name in model.ansatz.parameters]


class LossFunction:
    """Cross-entropy over a fixed batch, with cached feature states."""

    def __init__(self, model: VqcModel, batch: Dataset):
        if len(batch) == 0:
            raise ValueError("empty batch")
        self.model = model
        self.labels = batch.labels
        self.states = feature_states(model, batch.features)
        self.mask = odd_parity_mask(model.n_qubits)
        self.n_evaluations = 0

    def _label_probs(self, unitary: np.ndarray) -> np.ndarray:
        p1 = _p1(self.states, unitary, self.mask)
        return np.where(self.labels == 1, p1, 1.0 - p1)

    def __call__(self, theta) -> float:
        self.n_evaluations += 1
        p = self._label_probs(ansatz_unitary(self.model, theta))
        return float(np.mean(-np.log(np.maximum(p, PROB_FLOOR))))

    def gradient(self, theta) -> np.ndarray:
        """Exact gradient via the two-term parameter-shift rule."""
        theta = np.asarray(theta, dtype=float)
        p = self._label_probs(ansatz_unitary(self.model, theta))
        weight = np.where(p > PROB_FLOOR, -1.0 / np.maximum(p, PROB_FLOOR), 0.0)
        grad = np.zeros(theta.size)
        for k, occurrences in enumerate(shift_occurrences(self.model)):
            dp = np.zeros_like(p)
            for index in occurrences:
                plus = self._label_probs(ansatz_unitary(self.model, theta, (index, math.pi / 2)))
                minus = self._label_probs(ansatz_unitary(self.model, theta, (index, -math.pi / 2)))
                dp += (plus - minus) / 2
            grad[k] = np.mean(weight * dp)
        return grad


def loss(model: VqcModel, batch: Dataset) -> float:
    return LossFunction(model, batch)(model.theta)


def parameter_shift_gradient(model: VqcModel, batch: Dataset) -> np.ndarray:
    return LossFunction(model, batch).gradient(model.theta)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def predict(model: VqcModel, x) -> np.ndarray:
    """Labels by argmax of (p0, p1); ties go to 0."""
    probs = class_probabilities(model, x)
    return (probs[:, 1] > probs[:, 0]).astype(int)


def confusion_matrix(model: VqcModel, data: Dataset) -> np.ndarray:
    """Rows are true labels, columns predicted labels."""
    pred = predict(model, data.features)
    out = np.zeros((2, 2), dtype=int)
    np.add.at(out, (data.labels, pred), 1)
    return out


def score(model: VqcModel, data: Dataset) -> float:
    return float(np.mean(predict(model, data.features) == data.labels))


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


@dataclass
class TrainingRecord:
    optimizer: str
    feature_map: str
    loss_history: list[float]
    param_history: list[np.ndarray]
    final_theta: np.ndarray
    train_accuracy: float
    test_accuracy: Optional[float]
    confusion: np.ndarray
    n_evaluations: int = 0
    status: str = ""
    failed: bool = False
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def to_json(self, digits: int = 10) -> dict:
        def r(v):
            return float(f"{v:.{digits}g}")

        return {
            "optimizer": self.optimizer,
            "feature_map": self.feature_map,
            "loss_history": [r(v) for v in self.loss_history],
            "param_history": [[r(v) for v in p] for p in self.param_history],
            "final_theta": [r(v) for v in self.final_theta],
            "train_accuracy": r(self.train_accuracy),
            "test_accuracy": None if self.test_accuracy is None else r(self.test_accuracy),
            "confusion": self.confusion.astype(int).tolist(),
            "n_evaluations": self.n_evaluations,
            "status": self.status,
            "failed": self.failed,
            "seed": self.seed,
            **self.extra,
        }


def initial_theta(n_params: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.0, 2 * math.pi, n_params)


def fit(model: VqcModel, train: Dataset, optimizer: OptimizerName = "cobyla", max_iter: int = 100,
        seed: int = 42, test: Optional[Dataset] = None, rho_begin: float = 1.0,
        rho_end: float = 1e-4, memory: int = 10, callback=None) -> tuple[VqcModel, TrainingRecord]:
    """Train the ansatz weights from a seeded uniform start in [0, 2*pi)."""
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    objective = LossFunction(model, train)
    theta0 = initial_theta(model.ansatz.num_parameters, seed)
    failed = False
    try:
        if optimizer == "cobyla":
            result = minimize_cobyla(objective, theta0, max_iter, rho_begin, rho_end, callback=callback)
        elif optimizer == "lbfgsb":
            result = minimize_lbfgsb(objective, objective.gradient, theta0, max_iter,
                                     memory=memory, callback=callback)
        else:
            raise ValueError(f"unknown optimizer {optimizer!r}")
    except NonFiniteObjectiveError as exc:
        log.warning("training aborted: %s", exc)
        result, failed = exc.result, True
    final = result.best_params if result.best_params.size else theta0
    trained = model.with_theta(final)
    evaluated = test if test is not None else train
    record = TrainingRecord(
        optimizer=optimizer,
        feature_map=model.feature_map_name,
        loss_history=result.loss_history,
        param_history=result.param_history,
        final_theta=final.copy(),
        train_accuracy=score(trained, train),
        test_accuracy=None if test is None else score(trained, test),
        confusion=confusion_matrix(trained, evaluated),
        n_evaluations=result.n_evaluations,
        status=result.status,
        failed=failed,
        seed=seed,
    )
    return trained, record


def optimizer_result_summary(result: OptimizerResult) -> str:
    return f"{result.status}: best loss {result.best_loss:.6g} after {result.n_evaluations} evaluations"
