#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Two hot paths: candidate support counting inside the itemset miner, and
directed triangle counting on cohort-scale follow graphs.

    python benchmarks/bench_kernels.py [--scale 1.0]
"""
from __future__ import annotations

import argparse
import random
import time

import numpy as np

from hashmine.itemsets import Transaction, apriori
from hashmine.kernels import _pykernels

try:
    from hashmine.kernels import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, repeat=3):
    best = float("inf")
    value = None
    for _ in range(repeat):
        start = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - start)
    return best, value


def bench_support_counting(scale: float):
    rng = random.Random(1)
    n_items = int(400 * scale)
    n_tx = int(20_000 * scale)
    transactions = [
        sorted(rng.sample(range(n_items), rng.randint(4, 12))) for _ in range(n_tx)
    ]
    pool = list(range(n_items))
    # one mining level counts same-size candidates, as apriori does
    candidates = [tuple(sorted(rng.sample(pool, 3))) for _ in range(4000)]

    rows = []
    backends = [("python", _pykernels)] + ([("c", _ckernels)] if _ckernels else [])
    results = {}
    for name, backend in backends:
        counter = backend.ItemsetCounter(transactions, n_items)
        elapsed, counts = timeit(lambda c=counter: c.count_candidates(candidates))
        results[name] = list(counts)
        rows.append((f"support counting [{name}]", elapsed, f"{len(candidates)} candidates x {n_tx} tx"))
    if len(results) == 2:
        assert results["python"] == results["c"], "backend mismatch"
    return rows


def bench_apriori(scale: float):
    rng = random.Random(2)
    vocab = [f"tag{i:03d}" for i in range(int(150 * scale))]
    hot = vocab[:12]
    transactions = []
    for t in range(int(8_000 * scale)):
        items = set(rng.sample(hot, rng.randint(2, 5)))
        items.update(rng.sample(vocab, rng.randint(1, 6)))
        transactions.append(Transaction(id=f"t{t}", items=frozenset(items)))

    rows = []
    outputs = {}
    for name, backend in [("python", _pykernels)] + ([("c", _ckernels)] if _ckernels else []):
        elapsed, out = timeit(
            lambda b=backend: apriori(transactions, 0.02, counter_cls=b.ItemsetCounter),
            repeat=2,
        )
        outputs[name] = {(s.items, s.count) for s in out}
        rows.append((f"apriori end-to-end [{name}]", elapsed, f"{len(transactions)} tx, minsup 0.02"))
    if len(outputs) == 2:
        assert outputs["python"] == outputs["c"], "backend mismatch"
    return rows


def bench_triangles(scale: float):
    rng = random.Random(3)
    n = int(3_000 * scale)
    m = int(60_000 * scale)
    succ = [set() for _ in range(n)]
    while sum(len(s) for s in succ) < m:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            succ[a].add(b)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = []
    for v in range(n):
        row = sorted(succ[v])
        indices.extend(row)
        indptr[v + 1] = len(indices)
    succ_indices = np.array(indices, dtype=np.int32)
    pred = [[] for _ in range(n)]
    for a in range(n):
        for b in succ[a]:
            pred[b].append(a)
    pred_indptr = np.zeros(n + 1, dtype=np.int64)
    pred_list = []
    for v in range(n):
        row = sorted(pred[v])
        pred_list.extend(row)
        pred_indptr[v + 1] = len(pred_list)
    pred_indices = np.array(pred_list, dtype=np.int32)

    rows = []
    totals = {}
    for name, backend in [("python", _pykernels)] + ([("c", _ckernels)] if _ckernels else []):
        elapsed, (total, _) = timeit(
            lambda b=backend: b.triangle_participation(
                n, indptr, succ_indices, pred_indptr, pred_indices
            ),
            repeat=2,
        )
        totals[name] = total
        rows.append((f"triangle counting [{name}]", elapsed, f"n={n}, m={m}, cycles={total}"))
    if len(totals) == 2:
        assert totals["python"] == totals["c"], "backend mismatch"
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scale", type=float, default=1.0, help="problem size multiplier")
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels not built; benchmarking pure Python only\n")

    all_rows = []
    for bench in (bench_support_counting, bench_apriori, bench_triangles):
        all_rows.extend(bench(args.scale))
        all_rows.append(None)

    width = max(len(r[0]) for r in all_rows if r)
    print(f"{'benchmark'.ljust(width)}  {'best time':>10}  detail")
    print("-" * (width + 50))
    section = {}
    for row in all_rows:
        if row is None:
            section = {}
            continue
        name, elapsed, detail = row
        print(f"{name.ljust(width)}  {elapsed * 1000:9.1f}ms  {detail}")
        key = name.split("[")[0]
        section[name] = elapsed
        py_key = f"{key}[python]"
        c_key = f"{key}[c]"
        if py_key in section and c_key in section:
            print(f"{''.ljust(width)}  {'':>10}  speedup: {section[py_key] / section[c_key]:.1f}x")


if __name__ == "__main__":
    main()
