"""Command-line entry point: ``qencode <command> [flags]``.

Exit codes: 0 success, 1 usage or validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import circuit as qc
from . import data as qdata
from . import diagnostics, encoders, varforms, vqc
from .optimize import HistoryEntry, write_history_csv
from .plotting import plot_loss, plot_parameters

log = logging.getLogger("qencode")

# test accuracies reported for the 100-iteration runs
REFERENCE_ACCURACY = {
    ("hybrid", "cobyla"): 0.95,
    ("hybrid", "lbfgsb"): 0.90,
    ("zz", "cobyla"): 0.61,
    ("zz", "lbfgsb"): 0.62,
}
DIGITS = 10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def rounded(obj, digits: int = DIGITS):
    """Recursively round floats to ``digits`` significant digits."""
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if not math.isfinite(value) else float(f"{value:.{digits}g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist(), digits)
    if isinstance(obj, dict):
        return {k: rounded(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v, digits) for v in obj]
    return obj


def write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(rounded(obj), indent=2) + "\n", encoding="utf-8")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Manifest:
    def __init__(self, command: str, config: dict, out_dir: Path):
        self.command = command
        self.config = config
        self.out_dir = out_dir
        self.inputs: list[Path] = []
        self.outputs: list[Path] = []
        self.start = time.perf_counter()

    def add(self, path: Path) -> Path:
        self.outputs.append(path)
        return path

    def write(self) -> Path:
        doc = {
            "command": self.command,
            "config": self.config,
            "seeds": {k: v for k, v in self.config.items() if "seed" in k},
            "inputs": [{"path": str(p), "sha256": sha256(p)} for p in self.inputs],
            "outputs": [{"path": p.name, "sha256": sha256(p)} for p in self.outputs],
            "duration_s": round(time.perf_counter() - self.start, 3),
        }
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        return path


def _config(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "verbose")}


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# gen-data
# ---------------------------------------------------------------------------


def cmd_gen_data(args) -> int:
    config = qdata.GeneratorConfig(
        n_samples=args.n_samples, n_features=args.n_features, n_informative=args.n_informative,
        n_redundant=args.n_redundant, n_clusters_per_class=args.clusters_per_class,
        class_sep=args.class_sep, seed=args.seed, shuffle=args.shuffle,
    )
    try:
        config.validate()
    except qdata.DataError as exc:
        raise UsageError(str(exc)) from None
    out = _out_dir(args)
    manifest = Manifest("gen-data", _config(args), out)
    dataset = qdata.generate_classification(config)
    path = manifest.add(out / args.filename)
    qdata.write_csv(dataset, path)
    manifest.write()
    print(f"wrote {len(dataset)} rows x {dataset.n_features} features to {path}")
    return 0


# ---------------------------------------------------------------------------
# encode / diagnose
# ---------------------------------------------------------------------------


def _load_row(args) -> np.ndarray:
    if args.values is not None:
        try:
            return np.array([float(v) for v in args.values.split(",")])
        except ValueError as exc:
            raise UsageError(f"--values: {exc}") from None
    if args.data is None:
        raise UsageError("give either --values or --data")
    dataset = qdata.read_csv(args.data)
    if args.scale != "none":
        dataset = qdata.apply_scaler(qdata.fit_scaler(dataset, args.scale), dataset)
    if not 0 <= args.row < len(dataset):
        raise UsageError(f"--row {args.row} outside 0..{len(dataset) - 1}")
    return dataset.features[args.row]


def _encode_report(method: str, row: np.ndarray, partition: Sequence[int]) -> dict:
    circ = encoders.encode(method, row)
    state = qc.run(circ)
    st = qc.stats(circ)
    report = {
        "method": method,
        "features": row,
        "n_qubits": circ.n_qubits,
        "circuit": qc.circuit_to_json(circ),
        "stats": {"depth": st.depth, "width": st.width, "num_parameters": st.num_parameters,
                  "op_counts": st.op_counts},
        "statevector": state.to_json(),
        "probabilities": qc.probabilities(state),
        "bloch_vectors": [list(diagnostics.bloch_vector(state, q)) for q in range(state.n_qubits)],
    }
    probs = qc.probabilities(state)
    top = int(np.argmax(probs))
    report["most_likely"] = {"ket": state.ket(top), "amplitude": [state.amplitudes[top].real,
                             state.amplitudes[top].imag], "probability": probs[top]}
    if state.n_qubits > 1 and partition is not None:
        report["diagnostics"] = diagnostics.report(state, partition)
    return report


def cmd_encode(args) -> int:
    row = _load_row(args)
    out = _out_dir(args)
    manifest = Manifest("encode", _config(args), out)
    if args.data:
        manifest.inputs.append(Path(args.data))
    report = _encode_report(args.method, row, args.partition if args.diagnose else None)
    path = manifest.add(out / f"encode_{args.method}.json")
    write_json(report, path)
    manifest.write()
    print(f"{args.method}: {report['n_qubits']} qubits, ops {report['stats']['op_counts']}, "
          f"most likely {report['most_likely']['ket']} (p={report['most_likely']['probability']:.4f})")
    return 0


def cmd_diagnose(args) -> int:
    row = _load_row(args)
    out = _out_dir(args)
    manifest = Manifest("diagnose", _config(args), out)
    if args.data:
        manifest.inputs.append(Path(args.data))
    state = qc.run(encoders.encode(args.method, row))
    if state.n_qubits < 2:
        raise UsageError("diagnostics need at least 2 qubits")
    bipartitions = [diagnostics.report(state, [q]) for q in range(state.n_qubits)]
    doc = {"method": args.method, "n_qubits": state.n_qubits, "bipartitions": bipartitions}
    path = manifest.add(out / f"diagnose_{args.method}.json")
    write_json(doc, path)
    manifest.write()
    for rep in bipartitions:
        print(f"qubits {rep['bipartition'][0]} | rest: purity {rep['purity']:.4f}, "
              f"entropy {rep['entropy_bits']:.4f} bits, schmidt {np.round(rep['schmidt_coefficients'], 4).tolist()}")
    return 0


# ---------------------------------------------------------------------------
# train / compare
# ---------------------------------------------------------------------------


def prepare_data(data_path: Optional[str], test_fraction: float, split_seed: int):
    """Load (or generate the default fixture), split, then min-max scale to [0, pi] fitted on train."""
    if data_path is not None and not Path(data_path).exists():
        raise FileNotFoundError(f"data file not found: {data_path}")
    dataset = qdata.load_or_generate(data_path)
    train, test = qdata.train_test_split(dataset, test_fraction, split_seed)
    scaler = qdata.fit_scaler(train, "minmax", (0.0, math.pi))
    return qdata.apply_scaler(scaler, train), qdata.apply_scaler(scaler, test), scaler


def train_one(feature_map: str, optimizer: str, max_iter: int, seed: int, data_path: Optional[str],
              reps: int, entanglement: str, test_fraction: float, split_seed: int,
              rho_begin: float = 1.0, rho_end: float = 1e-4, memory: int = 10):
    train, test, scaler = prepare_data(data_path, test_fraction, split_seed)
    model = vqc.make_model(feature_map, train.n_features, reps, entanglement, scaler=scaler)
    trained, record = vqc.fit(model, train, optimizer, max_iter, seed, test=test,
                              rho_begin=rho_begin, rho_end=rho_end, memory=memory)
    record.extra.update({
        "circuit_parameters": model.circuit.num_parameters,
        "theta_dim": model.ansatz.num_parameters,
        "n_qubits": model.n_qubits,
        "scaler": scaler.to_json(),
    })
    return record


def _write_record(record: vqc.TrainingRecord, out: Path, stem: str, manifest: Manifest) -> None:
    write_json(record.to_json(DIGITS), manifest.add(out / f"{stem}_record.json"))
    write_history_csv(_history_entries(record), manifest.add(out / f"{stem}_history.csv"))


def _history_entries(record: vqc.TrainingRecord) -> list[HistoryEntry]:
    return [HistoryEntry(i + 1, loss, np.asarray(p))
            for i, (loss, p) in enumerate(zip(record.loss_history, record.param_history))]


def cmd_train(args) -> int:
    out = _out_dir(args)
    manifest = Manifest("train", _config(args), out)
    if args.data:
        manifest.inputs.append(Path(args.data))
    record = train_one(args.feature_map, args.optimizer, args.max_iter, args.seed, args.data,
                       args.reps, args.entanglement, args.test_fraction, args.split_seed,
                       args.rho_begin, args.rho_end, args.memory)
    stem = f"{args.feature_map}_{args.optimizer}"
    _write_record(record, out, stem, manifest)
    plot_loss({args.optimizer: record.loss_history}, manifest.add(out / f"{stem}_loss.svg"),
              f"Loss evolution ({args.feature_map} feature map)")
    plot_parameters(record.param_history, manifest.add(out / f"{stem}_params.svg"),
                    f"Ansatz parameters ({args.feature_map}, {args.optimizer})")
    manifest.write()
    print(f"{stem}: train acc {record.train_accuracy:.3f}, test acc {record.test_accuracy:.3f}, "
          f"{len(record.loss_history)} iterations, final loss {record.loss_history[-1]:.4f}")
    return 0


def _compare_cell(kwargs):
    return train_one(**kwargs)


def comparison_table(records: dict) -> list[dict]:
    rows = []
    for (fm, opt), rec in records.items():
        rows.append({
            "feature_map": fm,
            "optimizer": opt,
            "train_acc": rec.train_accuracy,
            "test_acc": rec.test_accuracy,
            "reference_test_acc": REFERENCE_ACCURACY[(fm, opt)],
        })
    return rows


def format_table(rows: list[dict], records: dict) -> str:
    lines = [f"{'feature_map':<12}{'optimizer':<10}{'train_acc':>10}{'test_acc':>10}{'reference':>10}"]
    for r in rows:
        lines.append(f"{r['feature_map']:<12}{r['optimizer']:<10}{r['train_acc']:>10.4f}"
                     f"{r['test_acc']:>10.4f}{r['reference_test_acc']:>10.2f}")
    lines.append("")
    lines.append("Final ansatz parameters")
    keys = list(records)
    lines.append("".join(f"{fm + '/' + opt:>16}" for fm, opt in keys))
    dim = len(records[keys[0]].final_theta)
    for k in range(dim):
        lines.append("".join(f"{'θ[%d] = %.4f' % (k, records[key].final_theta[k]):>16}" for key in keys))
    return "\n".join(lines) + "\n"


def cmd_compare(args) -> int:
    out = _out_dir(args)
    manifest = Manifest("compare", _config(args), out)
    if args.data:
        manifest.inputs.append(Path(args.data))
    cells = [(fm, opt) for fm in ("hybrid", "zz") for opt in ("cobyla", "lbfgsb")]
    kwargs = [dict(feature_map=fm, optimizer=opt, max_iter=args.max_iter, seed=args.seed,
                   data_path=args.data, reps=args.reps, entanglement=args.entanglement,
                   test_fraction=args.test_fraction, split_seed=args.split_seed) for fm, opt in cells]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_compare_cell, kwargs))
    else:
        results = [_compare_cell(k) for k in kwargs]
    records = dict(zip(cells, results))
    for (fm, opt), rec in records.items():
        _write_record(rec, out, f"{fm}_{opt}", manifest)
        plot_parameters(rec.param_history, manifest.add(out / f"{fm}_{opt}_params.svg"),
                        f"Ansatz parameter evolution ({fm}, {opt})")
    for fm in ("hybrid", "zz"):
        plot_loss({opt: records[(fm, opt)].loss_history for opt in ("cobyla", "lbfgsb")},
                  manifest.add(out / f"{fm}_loss.svg"), f"Loss evolution ({fm} feature map)")
    rows = comparison_table(records)
    doc = {
        "rows": rows,
        "final_parameters": {f"{fm}/{opt}": rec.final_theta for (fm, opt), rec in records.items()},
        "reference_test_acc": {f"{fm}/{opt}": v for (fm, opt), v in REFERENCE_ACCURACY.items()},
    }
    write_json(doc, manifest.add(out / "comparison.json"))
    text = format_table(rows, records)
    (out / "comparison.txt").write_text(text, encoding="utf-8")
    manifest.add(out / "comparison.txt")
    manifest.write()
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------


def cmd_stats(args) -> int:
    if args.feature_map == "zz":
        circ = varforms.standard_vqc_circuit(args.n_qubits, args.reps, args.entanglement,
                                             args.ansatz_entanglement)
    else:
        circ = varforms.hybrid_vqc_circuit(args.n_qubits, args.reps, args.entanglement)
    for label, c in (("top-level", circ), ("decomposed", qc.decompose(circ))):
        s = qc.stats(c)
        print(f"{label}: {s.depth}, {s.width}, {s.num_parameters}, {list(s.op_counts.items())}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qencode", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-data", help="write the synthetic classification dataset as CSV")
    p.add_argument("--n-samples", type=_positive_int, default=1000)
    p.add_argument("--n-features", type=_positive_int, default=6)
    p.add_argument("--n-informative", type=_positive_int, default=2)
    p.add_argument("--n-redundant", type=int, default=2)
    p.add_argument("--clusters-per-class", type=_positive_int, default=2)
    p.add_argument("--class-sep", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--shuffle", action="store_true")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--filename", default="dataset.csv")
    p.set_defaults(func=cmd_gen_data)

    for name, func, help_text in (("encode", cmd_encode, "encode one sample and report its state"),
                                  ("diagnose", cmd_diagnose, "entanglement report for an encoded sample")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--method", choices=encoders.METHODS, required=True)
        p.add_argument("--values", help="comma-separated feature values")
        p.add_argument("--data", help="CSV file to take the row from")
        p.add_argument("--row", type=int, default=0)
        p.add_argument("--scale", choices=("none", "standard", "minmax"), default="none")
        p.add_argument("--out-dir", default=".")
        if name == "encode":
            p.add_argument("--diagnose", action="store_true", help="include entanglement diagnostics")
            p.add_argument("--partition", type=int, nargs="+", default=[0])
        p.set_defaults(func=func)

    def training_flags(p):
        p.add_argument("--max-iter", type=_positive_int, default=100)
        p.add_argument("--seed", type=int, default=42, help="seed for the initial weights")
        p.add_argument("--split-seed", type=int, default=42)
        p.add_argument("--data", help="dataset CSV (default: regenerate the seed-42 dataset)")
        p.add_argument("--out-dir", default=".")
        p.add_argument("--reps", type=_positive_int, default=2)
        p.add_argument("--entanglement", choices=("linear", "reverse_linear", "full"), default="linear")
        p.add_argument("--test-fraction", type=_fraction, default=0.2)

    p = sub.add_parser("train", help="train one classifier")
    p.add_argument("--feature-map", choices=("hybrid", "zz"), default="hybrid")
    p.add_argument("--optimizer", choices=("cobyla", "lbfgsb"), default="cobyla")
    p.add_argument("--rho-begin", type=float, default=1.0)
    p.add_argument("--rho-end", type=float, default=1e-4)
    p.add_argument("--memory", type=_positive_int, default=10)
    training_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="hybrid/zz x cobyla/lbfgsb grid")
    p.add_argument("--jobs", type=_positive_int, default=1)
    training_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("stats", help="print circuit statistics of a classifier circuit")
    p.add_argument("--feature-map", choices=("hybrid", "zz"), default="zz")
    p.add_argument("--n-qubits", type=_positive_int, default=6)
    p.add_argument("--reps", type=_positive_int, default=2)
    p.add_argument("--entanglement", choices=("linear", "reverse_linear", "full"), default="linear")
    p.add_argument("--ansatz-entanglement", choices=("linear", "reverse_linear", "full"), default=None)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"qencode {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"qencode {args.command}: failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
