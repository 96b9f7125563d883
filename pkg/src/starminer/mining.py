"""Frequent-itemset engines over keyed transaction groups.

Three miners share one output contract and are cross-checked in the tests:

* :func:`fi_gen` scans the groups once to build a bit-vector extent per code
  (the equivalence class of groups agreeing on "code present"), then counts
  every higher-level candidate by intersecting extents. One full scan total.
* :func:`apriori_baseline` is the classic level-wise miner: each level with a
  non-empty candidate set rescans every group and tests subset containment.
* :func:`brute_force_frequent` enumerates every subset of a small universe by
  direct containment counting; it is the oracle the other two are held to.

Support thresholds use exact rational arithmetic: ``minsup`` may be a decimal
string ("0.0045"), a Fraction, or a float (converted through its shortest
decimal repr), and an itemset is frequent iff its count reaches
``ceil(minsup * n_groups)``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .datamodel import BitmapTable, Item
from .errors import DataError


def exact_fraction(x: float | str | Fraction | int) -> Fraction:
    """Convert a user-supplied threshold to an exact fraction.

    Floats go through ``str()`` so that 0.0045 means 9/2000, not the nearest
    binary double; thresholds at values like 0.45% would otherwise be off by
    one on large group counts.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValueError("threshold must be a number, not a bool")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            raise ValueError(f"threshold {x!r} is not finite")
        return Fraction(str(x))
    return Fraction(str(x).strip())


def _validate_minsup(minsup: float | str | Fraction) -> Fraction:
    f = exact_fraction(minsup)
    if not 0 < f <= 1:
        raise ValueError(f"minsup must be in (0, 1], got {minsup!r}")
    return f


def support_threshold(minsup: float | str | Fraction, n_groups: int) -> int:
    """Minimum absolute count for an itemset to be frequent."""
    f = exact_fraction(minsup)
    return max(1, math.ceil(f * n_groups))


@dataclass(frozen=True)
class TransactionView:
    """Key-dimension groups and the code set each group carries.

    Groups keep first-occurrence order; ``code_universe`` is the sorted list
    of every code present in any group.
    """

    groups: tuple[tuple[str, frozenset[str]], ...]
    code_universe: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "groups", tuple((k, frozenset(c)) for k, c in self.groups)
        )
        object.__setattr__(self, "code_universe", tuple(self.code_universe))
        keys = [k for k, _ in self.groups]
        if len(set(keys)) != len(keys):
            raise DataError("transaction view has duplicate key values")
        present: set[str] = set()
        for _, codes in self.groups:
            present |= codes
        if set(self.code_universe) != present or list(self.code_universe) != sorted(present):
            raise DataError("code_universe must be the sorted union of group codes")

    @classmethod
    def from_groups(
        cls, groups: Iterable[tuple[str, Iterable[str]]]
    ) -> "TransactionView":
        normalized = tuple((k, frozenset(c)) for k, c in groups)
        universe: set[str] = set()
        for _, codes in normalized:
            universe |= codes
        return cls(groups=normalized, code_universe=tuple(sorted(universe)))

    @property
    def n_groups(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class FrequentItemset:
    """A sorted code tuple with its absolute and relative support."""

    items: tuple[str, ...]
    support_count: int
    support: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if list(self.items) != sorted(set(self.items)):
            raise DataError(f"itemset {self.items!r} must be sorted and duplicate-free")

    @property
    def level(self) -> int:
        return len(self.items)


@dataclass
class MiningStats:
    """Instrumentation counters for one mining run.

    ``full_scans_of_groups`` increments whenever every group is visited once;
    ``candidates_generated`` counts candidates whose support was evaluated
    (level 1 counts every single code); ``candidates_pruned`` counts join
    results discarded because an immediate subset was infrequent.
    """

    full_scans_of_groups: int = 0
    candidates_generated: int = 0
    candidates_pruned: int = 0
    elapsed: float = 0.0


# MdTable lives in mapcode; group_by_key accepts anything with .rows of
# (key, code) pairs to keep this module importable on its own.
def group_by_key(md) -> TransactionView:
    """Collect distinct key values in first-occurrence order and union each
    key's codes into one set (duplicate pairs collapse)."""
    order: list[str] = []
    codes_for: dict[str, set[str]] = {}
    for key, code in md.rows:
        if key not in codes_for:
            order.append(key)
            codes_for[key] = set()
        codes_for[key].add(code)
    return TransactionView.from_groups((k, codes_for[k]) for k in order)


def build_item_extents(
    view: TransactionView, stats: MiningStats | None = None
) -> BitmapTable:
    """One pass over the groups producing a bit vector per code.

    Bit ``j`` of code ``c``'s column is set iff group ``j`` carries ``c``:
    each column is the extent of the two-block partition that "has c" induces
    on the groups.
    """
    index = {c: i for i, c in enumerate(view.code_universe)}
    columns = [0] * len(view.code_universe)
    for j, (_, codes) in enumerate(view.groups):
        for c in codes:
            columns[index[c]] |= 1 << j
    if stats is not None:
        stats.full_scans_of_groups += 1
    items = tuple(
        Item(id=i, attribute="code", value=c) for i, c in enumerate(view.code_universe)
    )
    return BitmapTable(items=items, columns=tuple(columns), universe_size=view.n_groups)


def _apriori_join(prev: list[tuple[str, ...]]) -> list[tuple[str, ...]]:
    """Merge sorted (k-1)-itemsets sharing a (k-2)-prefix into k-candidates."""
    out: list[tuple[str, ...]] = []
    n = len(prev)
    i = 0
    while i < n:
        prefix = prev[i][:-1]
        block_end = i + 1
        while block_end < n and prev[block_end][:-1] == prefix:
            block_end += 1
        for a in range(i, block_end):
            for b in range(a + 1, block_end):
                out.append(prev[a] + (prev[b][-1],))
        i = block_end
    return out


def _prune(
    candidates: list[tuple[str, ...]], prev_frequent: set[tuple[str, ...]]
) -> tuple[list[tuple[str, ...]], int]:
    """Drop candidates with an infrequent (k-1)-subset; return survivors and
    the number pruned."""
    kept: list[tuple[str, ...]] = []
    pruned = 0
    for cand in candidates:
        if all(
            cand[:i] + cand[i + 1 :] in prev_frequent for i in range(len(cand))
        ):
            kept.append(cand)
        else:
            pruned += 1
    return kept, pruned


def _count_slice(
    cands: Sequence[tuple[str, ...]],
    parent_mask: dict[tuple[str, ...], int],
    single_mask: dict[str, int],
) -> list[tuple[tuple[str, ...], int, int]]:
    out = []
    for cand in cands:
        mask = parent_mask[cand[:-1]] & single_mask[cand[-1]]
        out.append((cand, mask, mask.bit_count()))
    return out


def fi_gen(
    view: TransactionView,
    minsup: float | str | Fraction,
    *,
    workers: int = 1,
) -> tuple[list[FrequentItemset], MiningStats]:
    """Mine all itemsets with support >= minsup using bitmap intersections.

    Level 1 reads the code extents; level k candidates come from the
    sorted-prefix join of frequent (k-1)-sets plus the subset prune, and each
    surviving candidate is counted as the population count of the AND of its
    parent's mask with its last item's extent. No group scan happens after
    the extent build, so ``full_scans_of_groups`` is always 1.

    ``workers`` > 1 splits candidate counting into contiguous slices handled
    by a thread pool; output is byte-identical to the serial run.
    """
    f = _validate_minsup(minsup)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    stats = MiningStats()
    start = time.perf_counter()

    n = view.n_groups
    threshold = max(1, math.ceil(f * n))

    extents = build_item_extents(view, stats)
    single_mask = {
        item.value: col for item, col in zip(extents.items, extents.columns)
    }

    result: list[FrequentItemset] = []
    stats.candidates_generated += len(view.code_universe)
    level_masks: dict[tuple[str, ...], int] = {}
    current: list[tuple[str, ...]] = []
    for code in view.code_universe:
        mask = single_mask[code]
        count = mask.bit_count()
        if count >= threshold:
            itemset = (code,)
            current.append(itemset)
            level_masks[itemset] = mask
            result.append(
                FrequentItemset(items=itemset, support_count=count, support=count / n)
            )

    while current:
        joined = _apriori_join(current)
        stats.candidates_generated += len(joined)
        candidates, pruned = _prune(joined, set(current))
        stats.candidates_pruned += pruned
        if not candidates:
            break

        if workers == 1 or len(candidates) < 64:
            counted = _count_slice(candidates, level_masks, single_mask)
        else:
            step = math.ceil(len(candidates) / workers)
            slices = [candidates[i : i + step] for i in range(0, len(candidates), step)]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(
                    pool.map(lambda s: _count_slice(s, level_masks, single_mask), slices)
                )
            counted = [entry for part in parts for entry in part]

        next_level: list[tuple[str, ...]] = []
        next_masks: dict[tuple[str, ...], int] = {}
        for cand, mask, count in counted:
            if count >= threshold:
                next_level.append(cand)
                next_masks[cand] = mask
                result.append(
                    FrequentItemset(items=cand, support_count=count, support=count / n)
                )
        current = next_level
        level_masks = next_masks

    stats.elapsed = time.perf_counter() - start
    return result, stats


def apriori_baseline(
    view: TransactionView, minsup: float | str | Fraction
) -> tuple[list[FrequentItemset], MiningStats]:
    """Classic level-wise miner: re-scan every group once per candidate level.

    Output is identical to :func:`fi_gen`; ``full_scans_of_groups`` equals the
    number of levels that had a non-empty candidate set, which is the depth of
    the explored lattice.
    """
    f = _validate_minsup(minsup)
    stats = MiningStats()
    start = time.perf_counter()

    n = view.n_groups
    threshold = max(1, math.ceil(f * n))
    group_sets = [codes for _, codes in view.groups]

    result: list[FrequentItemset] = []

    # Level 1: one scan counting every single code.
    singles = list(view.code_universe)
    stats.candidates_generated += len(singles)
    current: list[tuple[str, ...]] = []
    if singles:
        stats.full_scans_of_groups += 1
        counts: dict[str, int] = {c: 0 for c in singles}
        for codes in group_sets:
            for c in codes:
                counts[c] += 1
        for c in singles:
            if counts[c] >= threshold:
                current.append((c,))
                result.append(
                    FrequentItemset(items=(c,), support_count=counts[c], support=counts[c] / n)
                )

    k = 2
    while current:
        joined = _apriori_join(current)
        stats.candidates_generated += len(joined)
        candidates, pruned = _prune(joined, set(current))
        stats.candidates_pruned += pruned
        if not candidates:
            break

        stats.full_scans_of_groups += 1
        cand_sets = [(cand, frozenset(cand)) for cand in candidates]
        counts2: dict[tuple[str, ...], int] = {cand: 0 for cand in candidates}
        for codes in group_sets:
            if len(codes) < k:
                continue
            for cand, cset in cand_sets:
                if cset <= codes:
                    counts2[cand] += 1

        next_level: list[tuple[str, ...]] = []
        for cand in candidates:
            count = counts2[cand]
            if count >= threshold:
                next_level.append(cand)
                result.append(
                    FrequentItemset(items=cand, support_count=count, support=count / n)
                )
        current = next_level
        k += 1

    stats.elapsed = time.perf_counter() - start
    return result, stats


def brute_force_frequent(
    view: TransactionView, minsup: float | str | Fraction
) -> list[FrequentItemset]:
    """Exhaustive oracle: count every non-empty subset of the code universe
    by direct containment.

    Guarded to universes of at most 20 codes. Out-of-range minsup values are
    not rejected here; a minsup above 1 simply yields an unreachable
    threshold and an empty result.
    """
    if len(view.code_universe) > 20:
        raise ValueError(
            f"brute force limited to 20 codes, universe has {len(view.code_universe)}"
        )
    f = exact_fraction(minsup)
    n = view.n_groups
    threshold = max(1, math.ceil(f * n))
    group_sets = [codes for _, codes in view.groups]

    result: list[FrequentItemset] = []
    universe = list(view.code_universe)
    for size in range(1, len(universe) + 1):
        for combo in combinations(universe, size):
            cset = frozenset(combo)
            count = sum(1 for codes in group_sets if cset <= codes)
            if count >= threshold:
                result.append(
                    FrequentItemset(items=combo, support_count=count, support=count / n)
                )
    return result
