"""Compare the compiled factor kernels against the NumPy fallback.

Times the three primitive kernels on synthetic factor tables and full
posterior queries on random networks, once per available backend.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 8,12,16 --repeat 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from askbayes import _kernels
from askbayes.elicitation import DGParams, dg_to_probabilities
from askbayes.factors import DiscreteVariable, Factor, Role
from askbayes.inference import posterior
from askbayes.network import BayesianNetwork


def _random_star(n_questions: int, rng: np.random.Generator) -> BayesianNetwork:
    """Naive Bayes star: one binary skill, n binary questions."""
    variables = [DiscreteVariable("s", ("yes", "no"), Role.SKILL)]
    parents: dict[str, tuple[str, ...]] = {"s": ()}
    cpts = {"s": Factor(("s",), (2,), [0.5, 0.5])}
    for i in range(n_questions):
        qid = f"q{i}"
        delta = float(rng.uniform(0.2, 0.6))
        gamma = float(rng.uniform(delta / 2, 1 - delta / 2))
        p, pp = dg_to_probabilities(DGParams(delta, gamma))
        variables.append(DiscreteVariable(qid, ("correct", "incorrect"), Role.QUESTION))
        parents[qid] = ("s",)
        cpts[qid] = Factor(("s", qid), (2, 2), [p, 1 - p, pp, 1 - pp])
    return BayesianNetwork(variables, parents, cpts)


def bench_kernel_ops(size: int, repeat: int) -> dict[str, dict[str, float]]:
    """Raw kernel timings on tables with `size` binary axes."""
    rng = np.random.default_rng(7)
    cards_a = (2,) * size
    cards_b = (2,) * (size // 2)
    a = rng.random(2**size)
    b = rng.random(2 ** (size // 2))
    a_axes = tuple(range(size))
    b_axes = tuple(range(0, size, 2))[: size // 2]
    out_cards = cards_a

    results: dict[str, dict[str, float]] = {}
    for name in _kernels.available_backends():
        _kernels.use_backend(name)
        t0 = time.perf_counter()
        for _ in range(repeat):
            _kernels.product(a, a_axes, b, b_axes, out_cards)
        t_prod = (time.perf_counter() - t0) / repeat

        t0 = time.perf_counter()
        for _ in range(repeat):
            _kernels.sum_axis(a, cards_a, size // 2)
        t_sum = (time.perf_counter() - t0) / repeat

        t0 = time.perf_counter()
        for _ in range(repeat):
            _kernels.take_axis(a, cards_a, size // 2, 1)
        t_take = (time.perf_counter() - t0) / repeat

        results[name] = {"product": t_prod, "sum_axis": t_sum, "take_axis": t_take}
    return results


def bench_posteriors(n_questions: int, repeat: int) -> dict[str, float]:
    """End-to-end posterior queries on a star network."""
    rng = np.random.default_rng(11)
    net = _random_star(n_questions, rng)
    evidence = {f"q{i}": int(rng.integers(0, 2)) for i in range(0, n_questions, 2)}

    results: dict[str, float] = {}
    for name in _kernels.available_backends():
        _kernels.use_backend(name)
        t0 = time.perf_counter()
        for _ in range(repeat):
            posterior(net, ("s",), evidence)
        results[name] = (time.perf_counter() - t0) / repeat
    return results


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="10,14,18", help="binary axes per table, comma separated")
    ap.add_argument("--questions", default="16,64", help="questions per posterior benchmark")
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    if "c" not in backends:
        print("note: compiled extension not built, timing the fallback only")

    print("\nkernel primitives (seconds per call)")
    header = f"{'table':>12} {'op':>10}" + "".join(f" {b:>12}" for b in backends)
    print(header)
    for size in [int(s) for s in args.sizes.split(",")]:
        rows = bench_kernel_ops(size, args.repeat)
        for op in ("product", "sum_axis", "take_axis"):
            line = f"{2**size:>12} {op:>10}"
            for b in backends:
                line += f" {rows[b][op]:>12.6f}"
            if len(backends) == 2:
                ratio = rows["pure"][op] / max(rows["c"][op], 1e-12)
                line += f"   x{ratio:.2f}"
            print(line)

    print("\nposterior queries (seconds per call)")
    for nq in [int(s) for s in args.questions.split(",")]:
        rows = bench_posteriors(nq, args.repeat)
        line = f"{nq:>4} questions"
        for b in backends:
            line += f" {rows[b]:>12.6f}"
        if len(backends) == 2:
            line += f"   x{rows['pure'] / max(rows['c'], 1e-12):.2f}"
        print(line)

    _kernels.use_backend("c" if "c" in backends else "pure")


if __name__ == "__main__":
    main()
