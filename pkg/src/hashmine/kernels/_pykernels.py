"""Pure-Python kernels: the import-time fallback for the compiled extension.

Same interface as hashmine.kernels._ckernels; correctness reference and
the baseline side of benchmarks/bench_kernels.py.
"""
from __future__ import annotations

from typing import Iterable, Sequence


class ItemsetCounter:
    """Vertical bitmap support counter over dictionary-encoded transactions.

    Item id i owns one arbitrary-precision int whose bit t is set when
    transaction t contains i; the support of a candidate itemset is the
    popcount of the AND of its item bitmaps.
    """

    def __init__(self, transactions: Sequence[Iterable[int]], n_items: int):
        self.n_transactions = len(transactions)
        self.n_items = n_items
        cols = [0] * n_items
        for t, items in enumerate(transactions):
            bit = 1 << t
            for i in items:
                cols[i] |= bit
        self._cols = cols

    def item_counts(self) -> list[int]:
        return [c.bit_count() for c in self._cols]

    def count_candidates(self, candidates: Sequence[Sequence[int]]) -> list[int]:
        cols = self._cols
        out = []
        for cand in candidates:
            acc = cols[cand[0]]
            for i in cand[1:]:
                acc &= cols[i]
                if not acc:
                    break
            out.append(acc.bit_count())
        return out


def triangle_participation(n_nodes, succ_indptr, succ_indices, pred_indptr, pred_indices):
    """Count directed 3-cycles a->b->c->a over a CSR-encoded digraph.

    Returns (cycle_count, per_node) where per_node[v] is the number of
    distinct cycles through v.  For each edge (a, b) the third nodes are
    succ(b) & pred(a); crediting only the third node means every cycle
    credits each of its three nodes exactly once.
    """
    succ_sets = [
        set(succ_indices[succ_indptr[v] : succ_indptr[v + 1]]) for v in range(n_nodes)
    ]
    pred_sets = [
        set(pred_indices[pred_indptr[v] : pred_indptr[v + 1]]) for v in range(n_nodes)
    ]
    per_node = [0] * n_nodes
    credits = 0
    for a in range(n_nodes):
        pa = pred_sets[a]
        if not pa:
            continue
        for b in succ_sets[a]:
            for c in succ_sets[b] & pa:
                per_node[c] += 1
                credits += 1
    return credits // 3, per_node
