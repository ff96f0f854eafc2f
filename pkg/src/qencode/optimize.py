"""COBYLA-style and L-BFGS-B-style minimizers with iteration history.

Both record a history entry per iteration: one objective evaluation for
COBYLA, one accepted quasi-Newton step for L-BFGS-B.
"""

from __future__ import annotations

import csv
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class HistoryEntry:
    iteration: int
    loss: float
    params: np.ndarray


@dataclass
class OptimizerResult:
    best_params: np.ndarray
    best_loss: float
    n_evaluations: int
    n_iterations: int
    history: list[HistoryEntry] = field(default_factory=list)
    status: str = "max_iter"
    message: str = ""

    @property
    def loss_history(self) -> list[float]:
        return [h.loss for h in self.history]

    @property
    def param_history(self) -> list[np.ndarray]:
        return [h.params for h in self.history]


class NonFiniteObjectiveError(FloatingPointError):
    """Objective or gradient returned NaN/Inf. ``result`` holds progress so far."""

    def __init__(self, message: str, result: OptimizerResult):
        super().__init__(message)
        self.result = result


def finite_difference_gradient(f: Objective, x, eps: float = 1e-6) -> np.ndarray:
    """Central differences, one coordinate at a time."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for k in range(x.size):
        step = np.zeros_like(x)
        step[k] = eps
        grad[k] = (f(x + step) - f(x - step)) / (2 * eps)
    return grad


class _Tracker:
    """Counts evaluations and keeps the best point seen."""

    def __init__(self, f: Objective):
        self.f = f
        self.n_evaluations = 0
        self.best_x: Optional[np.ndarray] = None
        self.best_f = np.inf
        self.history: list[HistoryEntry] = []

    def __call__(self, x: np.ndarray) -> float:
        value = float(self.f(x))
        self.n_evaluations += 1
        if not np.isfinite(value):
            raise NonFiniteObjectiveError(
                f"objective returned {value} at evaluation {self.n_evaluations}", self.result("nonfinite")
            )
        if value < self.best_f:
            self.best_f, self.best_x = value, np.array(x, dtype=float)
        return value

    def record(self, loss: float, x: np.ndarray, callback) -> None:
        entry = HistoryEntry(len(self.history) + 1, float(loss), np.array(x, dtype=float))
        self.history.append(entry)
        if callback is not None:
            callback(entry)

    def result(self, status: str, message: str = "") -> OptimizerResult:
        best_x = self.best_x if self.best_x is not None else np.array([])
        return OptimizerResult(
            best_params=best_x.copy(),
            best_loss=float(self.best_f),
            n_evaluations=self.n_evaluations,
            n_iterations=len(self.history),
            history=list(self.history),
            status=status,
            message=message,
        )


# ---------------------------------------------------------------------------
# COBYLA (unconstrained)
# ---------------------------------------------------------------------------

# simplex acceptability: vertex-to-face distance >= ALPHA*rho, edge length <= BETA*rho
_ALPHA = 0.25
_BETA = 2.1
_GAMMA = 0.5  # length of a geometry-repair step, in units of rho
_POOR_RATIO = 0.1


def minimize_cobyla(f: Objective, x0, max_iter: int = 100, rho_begin: float = 1.0,
                    rho_end: float = 1e-4, callback=None) -> OptimizerResult:
    """Derivative-free minimization with linear models on a d+1 point simplex.

    The simplex starts at ``x0`` and ``x0 + rho_begin * e_k``. Each step moves
    a distance ``rho`` down the interpolated gradient; ``rho`` halves when
    steps stop paying off and the simplex is well shaped. ``max_iter`` caps
    the number of objective evaluations.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not rho_begin > rho_end > 0:
        raise ValueError("need rho_begin > rho_end > 0")
    x0 = np.array(x0, dtype=float).reshape(-1)
    d = x0.size
    track = _Tracker(f)

    def evaluate(x):
        value = track(x)
        track.record(value, x, callback)
        return value

    def budget_left():
        return len(track.history) < max_iter

    points = [x0.copy()]
    values = [evaluate(x0)]
    for k in range(d):
        if not budget_left():
            return track.result("max_iter", "budget spent building the initial simplex")
        x = x0.copy()
        x[k] += rho_begin
        points.append(x)
        values.append(evaluate(x))

    rho = rho_begin
    status, message = "max_iter", "evaluation budget exhausted"
    while budget_left():
        best = int(np.argmin(values))
        xb, fb = points[best], values[best]
        others = [i for i in range(d + 1) if i != best]
        edges = np.array([points[i] - xb for i in others])
        diffs = np.array([values[i] - fb for i in others])
        try:
            inv = np.linalg.inv(edges)
        except np.linalg.LinAlgError:
            inv = None
        lengths = np.linalg.norm(edges, axis=1)

        if inv is not None:
            grad = inv @ diffs
            face_dist = 1.0 / np.linalg.norm(inv, axis=0)
        else:
            grad = np.linalg.lstsq(edges, diffs, rcond=None)[0]
            face_dist = np.zeros(d)

        acceptable = np.all(face_dist >= _ALPHA * rho) and np.all(lengths <= _BETA * rho)
        if not acceptable:
            if np.any(lengths > _BETA * rho):
                j = int(np.argmax(lengths))
            else:
                j = int(np.argmin(face_dist))
            if inv is not None:
                normal = inv[:, j] * face_dist[j]
            else:
                normal = _orthogonal_direction(np.delete(edges, j, axis=0), d)
            step = _GAMMA * rho * normal
            if grad @ step > 0:
                step = -step
            x_new = xb + step
            points[others[j]] = x_new
            values[others[j]] = evaluate(x_new)
            continue

        gnorm = np.linalg.norm(grad)
        if gnorm > 0:
            step = -rho * grad / gnorm
            predicted = rho * gnorm
            x_new = xb + step
            f_new = evaluate(x_new)
            # replace the vertex whose swap keeps the simplex volume largest
            coeffs = np.linalg.solve(edges.T, step)
            score = np.abs(coeffs) * np.maximum(1.0, (lengths / rho) ** 2)
            j = int(np.argmax(score))
            points[others[j]] = x_new
            values[others[j]] = f_new
            if (fb - f_new) >= _POOR_RATIO * predicted:
                continue
        if rho <= rho_end:
            status, message = "converged", "trust radius reached rho_end"
            break
        rho *= 0.5
        if rho <= 1.5 * rho_end:
            rho = rho_end
        log.debug("cobyla: rho -> %g after %d evaluations", rho, len(track.history))

    return track.result(status, message)


def _orthogonal_direction(rows: np.ndarray, d: int) -> np.ndarray:
    if rows.size == 0:
        v = np.zeros(d)
        v[0] = 1.0
        return v
    _, _, vt = np.linalg.svd(rows)
    return vt[-1]


# ---------------------------------------------------------------------------
# L-BFGS-B
# ---------------------------------------------------------------------------

_ARMIJO = 1e-4
_SHRINK = 0.5
_MAX_BACKTRACKS = 20


def _project(x, lower, upper):
    return np.clip(x, lower, upper)


def _projected_gradient(x, g, lower, upper):
    pg = g.copy()
    pg[(x <= lower) & (g > 0)] = 0.0
    pg[(x >= upper) & (g < 0)] = 0.0
    return pg


def _two_loop(g: np.ndarray, pairs: deque) -> np.ndarray:
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def _refine_step(track, x, fx, g, direction, step, x_acc, f_acc, lower, upper):
    """One quadratic-interpolation probe past the Armijo point.

    Exact on quadratics, which gives BFGS its finite termination there; the
    probe is kept only if it lowers the objective.
    """
    slope = g @ direction
    curvature = f_acc - fx - slope * step
    if curvature <= 0 or slope >= 0:
        return x_acc, f_acc
    best = -slope * step**2 / (2 * curvature)
    if not 0.1 * step <= best <= 10 * step or abs(best - step) <= 1e-3 * step:
        return x_acc, f_acc
    x_try = x + best * direction
    if np.any(x_try < lower) or np.any(x_try > upper):
        return x_acc, f_acc
    f_try = track(x_try)
    if f_try < f_acc:
        return x_try, f_try
    return x_acc, f_acc


def minimize_lbfgsb(f: Objective, grad: Gradient, x0, max_iter: int = 100,
                    bounds: Optional[Sequence[tuple[float, float]]] = None, memory: int = 10,
                    gtol: float = 1e-8, callback=None) -> OptimizerResult:
    """Limited-memory BFGS with box constraints handled by projection.

    Coordinates pinned at a bound with the gradient pushing outward are held
    fixed for the step. Step lengths come from Armijo backtracking along the
    projected path, followed by one interpolation probe.
    """
    if memory < 1:
        raise ValueError("memory must be >= 1")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    x = np.array(x0, dtype=float).reshape(-1)
    d = x.size
    if bounds is None:
        lower, upper = np.full(d, -np.inf), np.full(d, np.inf)
    else:
        bnd = np.array([(-np.inf if lo is None else lo, np.inf if hi is None else hi)
                        for lo, hi in bounds], dtype=float)
        lower, upper = bnd[:, 0], bnd[:, 1]
    x = _project(x, lower, upper)
    track = _Tracker(f)

    def gradient(at):
        g = np.asarray(grad(at), dtype=float).reshape(-1)
        if g.shape != (d,):
            raise ValueError(f"gradient has shape {g.shape}, expected {(d,)}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteObjectiveError("gradient is not finite", track.result("nonfinite"))
        return g

    fx = track(x)
    g = gradient(x)
    pairs: deque = deque(maxlen=memory)
    status, message = "max_iter", "iteration limit reached"

    for it in range(max_iter):
        pg = _projected_gradient(x, g, lower, upper)
        if np.linalg.norm(pg) < gtol:
            status, message = "converged", "projected gradient below tolerance"
            break
        active = pg == 0
        direction = _two_loop(np.where(active, 0.0, g), pairs)
        direction[active] = 0.0
        if direction @ g >= 0:
            pairs.clear()
            direction = -pg
        step = 1.0
        if not pairs and it == 0:
            step = min(1.0, 1.0 / np.linalg.norm(direction))
        accepted = False
        for _ in range(_MAX_BACKTRACKS + 1):
            x_new = _project(x + step * direction, lower, upper)
            f_new = track(x_new)
            if f_new <= fx + _ARMIJO * (g @ (x_new - x)):
                accepted = True
                break
            step *= _SHRINK
        if not accepted:
            status, message = "line_search_failure", f"no sufficient decrease after {_MAX_BACKTRACKS} backtracks"
            break
        x_new, f_new = _refine_step(track, x, fx, g, direction, step, x_new, f_new, lower, upper)
        g_new = gradient(x_new)
        s, y = x_new - x, g_new - g
        sy = s @ y
        if sy > 1e-10 * (y @ y):
            pairs.append((s, y, 1.0 / sy))
        else:
            # negative curvature along s: the stored model is stale
            pairs.clear()
        x, fx, g = x_new, f_new, g_new
        track.record(fx, x, callback)

    if not track.history:
        track.record(fx, x, callback)
    return track.result(status, message)


# ---------------------------------------------------------------------------
# history export
# ---------------------------------------------------------------------------


def history_rows(history: Sequence[HistoryEntry], digits: int = 10) -> list[list[str]]:
    if not history:
        return [["iteration", "loss"]]
    dim = len(history[0].params)
    rows = [["iteration", "loss"] + [f"theta_{k}" for k in range(dim)]]
    for h in history:
        rows.append([str(h.iteration), f"{h.loss:.{digits}g}"] + [f"{v:.{digits}g}" for v in h.params])
    return rows


def write_history_csv(history: Sequence[HistoryEntry], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh, lineterminator="\n").writerows(history_rows(history))


def read_history_csv(path) -> list[HistoryEntry]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return [HistoryEntry(int(r[0]), float(r[1]), np.array([float(v) for v in r[2:]])) for r in rows[1:]]
