"""Follower-graph construction and the cohort network statistics.

Degree aggregates, the in/out ratio, directed 3-cycle ("triangle")
counts, top-k in-degree accounts and the regular-account filter.  The
triangle count is the performance-sensitive path at cohort scale, so it
runs on sorted-CSR adjacency through the selected kernels backend; a
mutual-edge (undirected-style) triangle count is available behind a flag
since published figures rarely say which convention they used.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels

ROLE_LABELS = {"dealer": "dealer", "page": "public page", "user": "user"}


class NetworkError(ValueError):
    pass


class DirectedGraph:
    """Immutable digraph: deduplicated edges, no self-loops, node metadata."""

    def __init__(
        self,
        edges: Iterable[tuple[str, str]],
        node_meta: Iterable[dict] | None = None,
    ):
        self._succ: dict[str, set[str]] = {}
        self._pred: dict[str, set[str]] = {}
        self._meta: dict[str, dict] = {}
        self.self_loops_dropped = 0
        self.duplicates_dropped = 0
        n_edges = 0
        for follower, followed in edges:
            if follower == followed:
                self.self_loops_dropped += 1
                continue
            succ = self._succ.setdefault(follower, set())
            if followed in succ:
                self.duplicates_dropped += 1
                continue
            succ.add(followed)
            self._pred.setdefault(followed, set()).add(follower)
            self._succ.setdefault(followed, set())
            self._pred.setdefault(follower, set())
            n_edges += 1
        self._n_edges = n_edges
        for meta in node_meta or ():
            node = meta["id"]
            self._succ.setdefault(node, set())
            self._pred.setdefault(node, set())
            self._meta[node] = {
                "role": meta.get("role", "unknown"),
                "cohort": meta.get("cohort", "unlabeled"),
            }

    @property
    def n_nodes(self) -> int:
        return len(self._succ)

    @property
    def n_edges(self) -> int:
        return self._n_edges

    def nodes(self) -> list[str]:
        return sorted(self._succ)

    def has_node(self, node: str) -> bool:
        return node in self._succ

    def in_degree(self, node: str) -> int:
        return len(self._pred.get(node, ()))

    def out_degree(self, node: str) -> int:
        return len(self._succ.get(node, ()))

    def successors(self, node: str) -> set[str]:
        return set(self._succ.get(node, ()))

    def role(self, node: str) -> str:
        return self._meta.get(node, {}).get("role", "unknown")

    def cohort(self, node: str) -> str:
        return self._meta.get(node, {}).get("cohort", "unlabeled")

    def csr(self):
        """Sorted-CSR adjacency (successors and predecessors) for the kernels."""
        order = self.nodes()
        index = {node: i for i, node in enumerate(order)}
        succ_indptr = np.zeros(len(order) + 1, dtype=np.int64)
        pred_indptr = np.zeros(len(order) + 1, dtype=np.int64)
        succ_indices = np.zeros(self._n_edges, dtype=np.int32)
        pred_indices = np.zeros(self._n_edges, dtype=np.int32)
        s = p = 0
        for i, node in enumerate(order):
            for j in sorted(index[v] for v in self._succ[node]):
                succ_indices[s] = j
                s += 1
            succ_indptr[i + 1] = s
            for j in sorted(index[v] for v in self._pred[node]):
                pred_indices[p] = j
                p += 1
            pred_indptr[i + 1] = p
        return order, succ_indptr, succ_indices, pred_indptr, pred_indices


def build_graph(
    follow_records: Iterable[tuple[str, str]],
    node_meta: Iterable[dict] | None = None,
) -> DirectedGraph:
    return DirectedGraph(follow_records, node_meta)


def read_edges_csv(source: str | Path) -> list[tuple[str, str]]:
    edges = []
    with open(source, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if len(row) >= 2 and row[0].strip():
                edges.append((row[0].strip(), row[1].strip()))
    return edges


def read_node_meta_jsonl(source: str | Path) -> list[dict]:
    out = []
    with open(source, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


@dataclass(frozen=True)
class GroupStats:
    avg_in: float
    avg_out: float
    avg_total_degree: float
    in_out_ratio: float | None
    n_nodes: int
    n_edges: int

    def to_doc(self) -> dict:
        return {
            "avg_in": round(self.avg_in, 2),
            "avg_out": round(self.avg_out, 2),
            "avg_total_degree": round(self.avg_total_degree, 2),
            "in_out_ratio": display_ratio(self.avg_in, self.avg_out),
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
        }


def display_ratio(avg_in: float, avg_out: float) -> float | None:
    """avg_in/avg_out at two-decimal display rounding; absent when out is 0."""
    if avg_out == 0:
        return None
    return round(avg_in / avg_out, 2)


def group_stats(graph: DirectedGraph, subset: Iterable[str]) -> GroupStats:
    """Degree averages over a node subset, degrees counted against the full
    graph.  Over the whole node set avg_in equals avg_out exactly."""
    members = [n for n in subset if graph.has_node(n)]
    if not members:
        raise NetworkError("group_stats over an empty subset")
    total_in = sum(graph.in_degree(n) for n in members)
    total_out = sum(graph.out_degree(n) for n in members)
    avg_in = total_in / len(members)
    avg_out = total_out / len(members)
    return GroupStats(
        avg_in=avg_in,
        avg_out=avg_out,
        avg_total_degree=avg_in + avg_out,
        in_out_ratio=(avg_in / avg_out) if avg_out else None,
        n_nodes=len(members),
        n_edges=graph.n_edges,
    )


def triangle_count(graph: DirectedGraph) -> tuple[int, dict[str, int]]:
    """Directed 3-cycles a->b->c->a; a mutually-linked triple counts once
    per orientation (so a fully symmetric triple counts 2).  Returns the
    total plus per-node cycle participation."""
    order, sp, si, pp, pi = graph.csr()
    total, per_node = kernels.triangle_participation(len(order), sp, si, pp, pi)
    return int(total), {node: int(per_node[i]) for i, node in enumerate(order)}


def triangle_count_oracle(graph: DirectedGraph) -> tuple[int, dict[str, int]]:
    """O(n^3) enumeration over unordered node triples; test oracle."""
    order = graph.nodes()
    succ = {n: graph.successors(n) for n in order}
    per_node = {n: 0 for n in order}
    total = 0
    for a, b, c in combinations(order, 3):
        for x, y, z in ((a, b, c), (a, c, b)):
            if y in succ[x] and z in succ[y] and x in succ[z]:
                total += 1
                per_node[a] += 1
                per_node[b] += 1
                per_node[c] += 1
    return total, per_node


def mutual_triangle_count(graph: DirectedGraph) -> int:
    """Undirected-style secondary metric: triangles in the mutual-edge graph."""
    succ = graph._succ
    mutual = {node: {v for v in succ[node] if node in succ[v]} for node in succ}
    total = 0
    for a in mutual:
        for b in mutual[a]:
            if b <= a:
                continue
            total += sum(1 for c in mutual[a] & mutual[b] if c > b)
    return total


def top_k_in_degree(
    graph: DirectedGraph, k: int, subset: Iterable[str] | None = None
) -> list[tuple[str, int]]:
    """k accounts by in-degree descending, ties by account id ascending."""
    if k < 1:
        raise NetworkError("k must be >= 1")
    nodes = list(subset) if subset is not None else graph.nodes()
    ranked = sorted(nodes, key=lambda n: (-graph.in_degree(n), n))
    return [(n, graph.in_degree(n)) for n in ranked[:k]]


def format_account(graph: DirectedGraph, node: str) -> str:
    """Render "name(role)" for annotated accounts, bare name otherwise."""
    role = graph.role(node)
    label = ROLE_LABELS.get(role)
    return f"{node}({label})" if label else node


def hub_by_triangles(graph: DirectedGraph) -> str | None:
    """The node sitting in the most directed 3-cycles; ties by id ascending;
    None for a triangle-free graph."""
    total, per_node = triangle_count(graph)
    if total == 0:
        return None
    return min(per_node, key=lambda n: (-per_node[n], n))


def regular_filter(
    graph: DirectedGraph, subset: Iterable[str], max_followers: int = 1000
) -> list[str]:
    """Not-popular accounts: strictly fewer than max_followers followers."""
    if max_followers < 0:
        raise NetworkError("max_followers must be >= 0")
    return [n for n in subset if graph.has_node(n) and graph.in_degree(n) < max_followers]


def network_report(
    graph: DirectedGraph,
    cohort_subsets: dict[str, list[str]],
    top_k: int = 10,
    include_mutual: bool = False,
) -> dict:
    """Stats-table report: one row per named subset plus triangle analysis.

    avg_total_degree is avg_in + avg_out by definition here; no other
    "average degree" convention is reported.
    """
    rows = {}
    for name, subset in cohort_subsets.items():
        members = [n for n in subset if graph.has_node(n)]
        rows[name] = group_stats(graph, members).to_doc() if members else None
    total, per_node = triangle_count(graph)
    hub = hub_by_triangles(graph)
    report = {
        "n_nodes": graph.n_nodes,
        "n_edges": graph.n_edges,
        "groups": rows,
        "triangles": total,
        "triangle_hub": format_account(graph, hub) if hub else None,
        "top_in_degree": [
            {"account": format_account(graph, n), "in_degree": d}
            for n, d in top_k_in_degree(graph, top_k)
        ],
    }
    if include_mutual:
        report["mutual_triangles"] = mutual_triangle_count(graph)
    return report
