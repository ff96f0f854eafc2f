"""Encode one sample with every method and print its most likely ket and diagnostics."""

import numpy as np

from qencode.circuit import probabilities, run, stats
from qencode.diagnostics import report
from qencode.encoders import METHODS, encode

SAMPLE = np.array([0.191, 0.639, 0.211, 0.241, 0.652, 0.166])


def main():
    x = SAMPLE * np.pi / SAMPLE.max()  # map into [0, pi] for the rotation encoders
    for method in METHODS:
        values = SAMPLE if method == "amplitude" else x
        circ = encode(method, values)
        state = run(circ)
        probs = probabilities(state)
        top = int(np.argmax(probs))
        s = stats(circ)
        print(f"{method:<9} qubits {circ.n_qubits}  depth {s.depth:>2}  ops {dict(s.op_counts)}")
        print(f"          most likely {state.ket(top)}  p = {probs[top]:.4f}  "
              f"nonzero terms {int(np.count_nonzero(probs > 1e-12))}")
        if circ.n_qubits > 1:
            rep = report(state, (0,))
            print(f"          qubit 0 | rest: purity {rep['purity']:.4f}, entropy {rep['entropy_bits']:.4f} bits")


if __name__ == "__main__":
    main()
