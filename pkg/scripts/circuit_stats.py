"""Top-level and decomposed statistics of both classifier circuits."""

from qencode.circuit import bind, decompose, stats
from qencode.varforms import build_hybrid_feature_map, hybrid_vqc_circuit, standard_vqc_circuit


def show(label, circ):
    s = stats(circ)
    print(f"{label:<40} {s.depth:>3}, {s.width}, {s.num_parameters:>2}, {list(s.op_counts.items())}")


def main():
    zz = standard_vqc_circuit()
    show("zz + real amplitudes (top level)", zz)
    show("zz + real amplitudes (decomposed)", decompose(zz))
    show("  ansatz CX order reversed (decomposed)", decompose(standard_vqc_circuit(ansatz_ent="reverse_linear")))
    show("  full entanglement (decomposed)", decompose(standard_vqc_circuit(ent="full")))
    hyb = hybrid_vqc_circuit()
    show("hybrid + real amplitudes (top level)", hyb)
    show("hybrid + real amplitudes (decomposed)", decompose(hyb))
    show("hybrid map bound to data", bind(build_hybrid_feature_map(6), {f"x[{i}]": 0.1 for i in range(6)}))


if __name__ == "__main__":
    main()
