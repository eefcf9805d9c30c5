# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: word-packed itemset support counting and directed
triangle counting.  Interface mirrors hashmine.kernels._pykernels."""

from libc.stdint cimport uint64_t, int32_t, int64_t

import numpy as np

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define HM_POPCOUNT64(x) __builtin_popcountll(x)
    #else
    static int HM_POPCOUNT64(unsigned long long x) {
        int c = 0;
        while (x) { x &= x - 1; ++c; }
        return c;
    }
    #endif
    """
    int HM_POPCOUNT64(unsigned long long x) nogil


cdef class ItemsetCounter:
    """Vertical bitmap support counter; bitmaps are rows of uint64 words."""

    cdef uint64_t[:, ::1] _cols
    cdef readonly Py_ssize_t n_transactions
    cdef readonly Py_ssize_t n_items

    def __init__(self, transactions, n_items):
        cdef Py_ssize_t n_tx = len(transactions)
        cdef Py_ssize_t n_words = (n_tx + 63) // 64 if n_tx else 1
        mat = np.zeros((n_items, n_words), dtype=np.uint64)
        cdef uint64_t[:, ::1] cols = mat
        cdef Py_ssize_t t, i
        for t, items in enumerate(transactions):
            for i in items:
                cols[i, t >> 6] |= (<uint64_t>1) << (t & 63)
        self._cols = cols
        self.n_transactions = n_tx
        self.n_items = n_items

    def item_counts(self):
        cdef Py_ssize_t i, w
        cdef long long total
        counts = []
        for i in range(self.n_items):
            total = 0
            for w in range(self._cols.shape[1]):
                total += HM_POPCOUNT64(self._cols[i, w])
            counts.append(total)
        return counts

    def count_candidates(self, candidates):
        n_cand = len(candidates)
        if n_cand == 0:
            return []
        k = len(candidates[0])
        flat = np.empty(n_cand * k, dtype=np.int32)
        cdef int32_t[::1] fv = flat
        cdef Py_ssize_t pos = 0
        for cand in candidates:
            for i in cand:
                fv[pos] = i
                pos += 1
        out = np.zeros(n_cand, dtype=np.int64)
        self._count(flat.reshape(n_cand, k), out)
        return out.tolist()

    cdef void _count(self, int32_t[:, ::1] cand, int64_t[::1] out):
        cdef Py_ssize_t n_cand = cand.shape[0]
        cdef Py_ssize_t k = cand.shape[1]
        cdef Py_ssize_t n_words = self._cols.shape[1]
        cdef Py_ssize_t ci, w, j
        cdef uint64_t acc
        cdef long long total
        with nogil:
            for ci in range(n_cand):
                total = 0
                for w in range(n_words):
                    acc = self._cols[cand[ci, 0], w]
                    for j in range(1, k):
                        acc &= self._cols[cand[ci, j], w]
                    total += HM_POPCOUNT64(acc)
                out[ci] = total


def triangle_participation(n_nodes, succ_indptr, succ_indices, pred_indptr, pred_indices):
    """Count directed 3-cycles over sorted-CSR adjacency.

    Returns (cycle_count, per_node numpy array); same crediting scheme as
    the pure backend (each cycle credits each member node exactly once).
    """
    sp = np.ascontiguousarray(succ_indptr, dtype=np.int64)
    si = np.ascontiguousarray(succ_indices, dtype=np.int32)
    pp = np.ascontiguousarray(pred_indptr, dtype=np.int64)
    pi = np.ascontiguousarray(pred_indices, dtype=np.int32)
    per_node = np.zeros(n_nodes, dtype=np.int64)
    cdef long long credits = _triangles(n_nodes, sp, si, pp, pi, per_node)
    return credits // 3, per_node


cdef long long _triangles(Py_ssize_t n_nodes,
                          int64_t[::1] succ_indptr, int32_t[::1] succ_indices,
                          int64_t[::1] pred_indptr, int32_t[::1] pred_indices,
                          int64_t[::1] per_node) nogil:
    cdef long long credits = 0
    cdef Py_ssize_t a, eb, b, i, j, i_end, j_end, j0
    for a in range(n_nodes):
        j0 = pred_indptr[a]
        j_end = pred_indptr[a + 1]
        if j0 == j_end:
            continue
        for eb in range(succ_indptr[a], succ_indptr[a + 1]):
            b = succ_indices[eb]
            i = succ_indptr[b]
            i_end = succ_indptr[b + 1]
            j = j0
            while i < i_end and j < j_end:
                if succ_indices[i] < pred_indices[j]:
                    i += 1
                elif succ_indices[i] > pred_indices[j]:
                    j += 1
                else:
                    per_node[succ_indices[i]] += 1
                    credits += 1
                    i += 1
                    j += 1
    return credits
