"""Apriori frequent-itemset mining and association rules over tag transactions.

Counts are exact integers and supports exact fractions; floats given as
thresholds are read as their decimal literal (0.1 means 1/10, not the
nearest binary double), so threshold comparisons behave the way the
number was written.

Support counting is the hot path: transactions are bitset-encoded over a
dictionary-compressed item universe and counted by the selected kernels
backend (compiled or pure Python).  brute_force_itemsets is the
exhaustive oracle used by the test suite and deliberately shares none of
that machinery.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from . import kernels


class MiningConfigError(ValueError):
    pass


class RuleIntegrityError(ValueError):
    pass


class UniverseTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Transaction:
    id: str
    items: frozenset[str]


@dataclass(frozen=True)
class ItemSet:
    items: frozenset[str]
    support: Fraction
    count: int

    def sorted_items(self) -> tuple[str, ...]:
        return tuple(sorted(self.items))


@dataclass(frozen=True)
class AssociationRule:
    antecedent: frozenset[str]
    consequent: frozenset[str]
    confidence: Fraction
    support: Fraction


def exact_fraction(value) -> Fraction:
    """Read a threshold as the decimal the caller wrote."""
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


def _check_min_support(min_support) -> Fraction:
    frac = exact_fraction(min_support)
    if not 0 < frac <= 1:
        raise MiningConfigError(f"min_support must be in (0, 1]: {min_support}")
    return frac


def _sort_key(itemset: ItemSet):
    return (-itemset.support, len(itemset.items), itemset.sorted_items())


def apriori(
    transactions: Sequence[Transaction],
    min_support,
    max_k: int | None = None,
    counter_cls=None,
) -> list[ItemSet]:
    """Level-wise Apriori: join frequent (k-1)-sets on their (k-2)-prefix,
    prune candidates with an infrequent subset, then count supports.

    Supports are fractions of ALL transactions, empty ones included.
    Output is sorted (support desc, size asc, lexicographic).
    """
    minsup = _check_min_support(min_support)
    n = len(transactions)
    if n < 1:
        raise MiningConfigError("need at least one transaction")
    counter_cls = counter_cls or kernels.ItemsetCounter

    universe = sorted({item for t in transactions for item in t.items})
    item_id = {item: i for i, item in enumerate(universe)}
    encoded = [sorted(item_id[i] for i in t.items) for t in transactions]
    counter = counter_cls(encoded, len(universe))

    # ceil(minsup * n) without leaving integer arithmetic
    min_count = max(1, -(-minsup.numerator * n // minsup.denominator))

    frequent: dict[tuple[int, ...], int] = {}
    level = []
    for i, count in enumerate(counter.item_counts()):
        if count >= min_count:
            frequent[(i,)] = count
            level.append((i,))
    level.sort()

    k = 2
    while level and (max_k is None or k <= max_k):
        candidates = []
        for a in range(len(level)):
            for b in range(a + 1, len(level)):
                first, second = level[a], level[b]
                if first[:-1] != second[:-1]:
                    break  # level is sorted; prefixes only diverge further
                cand = first + (second[-1],)
                # prune: dropping the last position gives a join parent,
                # already known frequent; check the rest
                if all(
                    cand[:j] + cand[j + 1 :] in frequent for j in range(len(cand) - 1)
                ):
                    candidates.append(cand)
        if not candidates:
            break
        counts = counter.count_candidates(candidates)
        level = []
        for cand, count in zip(candidates, counts):
            if count >= min_count:
                frequent[cand] = count
                level.append(cand)
        level.sort()
        k += 1

    result = [
        ItemSet(
            items=frozenset(universe[i] for i in ids),
            support=Fraction(count, n),
            count=count,
        )
        for ids, count in frequent.items()
    ]
    result.sort(key=_sort_key)
    return result


def brute_force_itemsets(
    transactions: Sequence[Transaction],
    min_support,
    max_universe: int = 20,
) -> list[ItemSet]:
    """Exhaustive oracle: enumerate every candidate itemset over the universe
    and count containment per transaction, refusing universes past
    max_universe.  Independent of the level-wise miner and its kernels.
    """
    minsup = _check_min_support(min_support)
    n = len(transactions)
    if n < 1:
        raise MiningConfigError("need at least one transaction")
    universe = sorted({item for t in transactions for item in t.items})
    u = len(universe)
    if u > max_universe:
        raise UniverseTooLargeError(f"{u} distinct items exceeds limit {max_universe}")

    item_bit = {item: 1 << i for i, item in enumerate(universe)}
    tx_masks = np.array(
        [sum(item_bit[i] for i in t.items) for t in transactions], dtype=np.int64
    )

    result = []
    chunk = 1 << 15
    for lo in range(1, 1 << u, chunk):
        masks = np.arange(lo, min(lo + chunk, 1 << u), dtype=np.int64)
        counts = ((masks[:, None] & tx_masks[None, :]) == masks[:, None]).sum(axis=1)
        for mask, count in zip(masks.tolist(), counts.tolist()):
            if count >= 1 and Fraction(count, n) >= minsup:
                items = frozenset(universe[i] for i in range(u) if mask >> i & 1)
                result.append(ItemSet(items=items, support=Fraction(count, n), count=count))
    result.sort(key=_sort_key)
    return result


def rules(itemsets: Sequence[ItemSet], min_confidence) -> list[AssociationRule]:
    """Emit A => S\\A for every frequent S and nonempty proper subset A with
    confidence support(S)/support(A) at or above the threshold.

    Requires subset-closed input (what Apriori produces); confidences are
    recomputed from counts, never carried floats.
    """
    minconf = exact_fraction(min_confidence)
    if not 0 < minconf <= 1:
        raise MiningConfigError(f"min_confidence must be in (0, 1]: {min_confidence}")
    by_items = {s.sorted_items(): s for s in itemsets}
    for s in itemsets:
        items = s.sorted_items()
        if len(items) < 2:
            continue
        for j in range(len(items)):
            sub = items[:j] + items[j + 1 :]
            if sub not in by_items:
                raise RuleIntegrityError(f"itemsets are not subset-closed at {sub}")

    out = []
    for s in itemsets:
        items = s.sorted_items()
        if len(items) < 2:
            continue
        for size in range(1, len(items)):
            for ante in combinations(items, size):
                ante_set = by_items[tuple(sorted(ante))]
                confidence = Fraction(s.count, ante_set.count)
                if confidence >= minconf:
                    out.append(
                        AssociationRule(
                            antecedent=frozenset(ante),
                            consequent=s.items - frozenset(ante),
                            confidence=confidence,
                            support=s.support,
                        )
                    )
    out.sort(
        key=lambda r: (
            -r.confidence,
            -r.support,
            tuple(sorted(r.antecedent)),
            tuple(sorted(r.consequent)),
        )
    )
    return out


def followed_accounts_transactions(
    users: Iterable, follow_edges: Iterable[tuple[str, str]]
) -> list[Transaction]:
    """One transaction per user: the accounts they follow.

    Users following nobody get an empty transaction, which still counts in
    the support denominator.
    """
    following: dict[str, set[str]] = {}
    for follower, followed in follow_edges:
        following.setdefault(follower, set()).add(followed)
    out = []
    for user in users:
        uid = getattr(user, "user_id", user)
        out.append(Transaction(id=uid, items=frozenset(following.get(uid, ()))))
    return out


# ---------------------------------------------------------------------------
# I/O: CSV (one transaction per row, comma-separated items) and JSONL

def read_transactions_csv(source: str | Path | IO[str]) -> list[Transaction]:
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(source))
    return [
        Transaction(id=f"t{i}", items=frozenset(cell.strip() for cell in row if cell.strip()))
        for i, row in enumerate(rows)
    ]


def read_transactions_jsonl(source: str | Path | IO[str]) -> list[Transaction]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    out = []
    for i, line in enumerate(lines):
        line = line.strip()
        if not line:
            continue
        doc = json.loads(line)
        out.append(
            Transaction(id=str(doc.get("id", f"t{i}")), items=frozenset(doc["items"]))
        )
    return out


def itemset_doc(itemset: ItemSet) -> dict:
    return {
        "items": list(itemset.sorted_items()),
        "count": itemset.count,
        "support": round(float(itemset.support), 3),
        "support_exact": f"{itemset.support.numerator}/{itemset.support.denominator}",
    }


def rule_doc(rule: AssociationRule) -> dict:
    return {
        "antecedent": sorted(rule.antecedent),
        "consequent": sorted(rule.consequent),
        "confidence": round(float(rule.confidence), 3),
        "confidence_exact": f"{rule.confidence.numerator}/{rule.confidence.denominator}",
        "support": round(float(rule.support), 3),
        "support_exact": f"{rule.support.numerator}/{rule.support.denominator}",
    }


def write_itemsets_jsonl(itemsets: Sequence[ItemSet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in itemsets:
            fh.write(json.dumps(itemset_doc(s), sort_keys=True) + "\n")


def write_rules_jsonl(rule_list: Sequence[AssociationRule], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in rule_list:
            fh.write(json.dumps(rule_doc(r), sort_keys=True) + "\n")
