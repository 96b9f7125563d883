"""Combined-dimension mapping codes.

Every distinct value combination of the selected dimensions gets one short
decimal code; the (key value, code) pairs form the table the miner groups
into transactions, and after mining the codes expand back into their
dimension/value pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .datamodel import RelationalTable
from .errors import DataError, SchemaError
from .mining import FrequentItemset

Pair = tuple[str, str]


class MapCodeRegistry:
    """Bijection between selected-dimension value tuples and codes.

    Codes are decimal strings assigned sequentially from "0001" in
    first-encounter order, zero-padded to at least four digits and widening
    naturally past 9999. Construction is single-threaded; lookups afterwards
    are safe to share.
    """

    def __init__(self, selected_dims: Sequence[str]):
        self.selected_dims = tuple(selected_dims)
        self._code_by_combo: dict[tuple[str, ...], str] = {}
        self._combo_by_code: dict[str, tuple[str, ...]] = {}

    def encode(self, values: Sequence[str]) -> str:
        """Return the code for a value tuple, assigning a fresh one if new."""
        combo = tuple(values)
        if len(combo) != len(self.selected_dims):
            raise SchemaError(
                f"combo {combo!r} does not match selected dimensions {self.selected_dims}"
            )
        code = self._code_by_combo.get(combo)
        if code is None:
            code = str(len(self._code_by_combo) + 1).zfill(4)
            self._code_by_combo[combo] = code
            self._combo_by_code[code] = combo
        return code

    def find(self, values: Sequence[str]) -> str | None:
        return self._code_by_combo.get(tuple(values))

    def decode(self, code: str) -> tuple[Pair, ...]:
        """Expand a code into its (dimension, value) pairs."""
        combo = self._combo_by_code.get(code)
        if combo is None:
            raise DataError(f"unknown mapping code {code!r}: registry is corrupt")
        return tuple(zip(self.selected_dims, combo))

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(self._combo_by_code)

    def __len__(self) -> int:
        return len(self._code_by_combo)

    def __contains__(self, code: str) -> bool:
        return code in self._combo_by_code

    def csv_lines(self) -> list[str]:
        """Audit export: one ``code,dim=value;dim=value`` line per entry."""
        lines = ["code,combo"]
        for code, combo in self._combo_by_code.items():
            rendered = ";".join(f"{d}={v}" for d, v in zip(self.selected_dims, combo))
            lines.append(f"{code},{rendered}")
        return lines

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.csv_lines()) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class MdTable:
    """(key value, code) pairs in first-encounter order, duplicates collapsed."""

    rows: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))


@dataclass(frozen=True)
class DecodedItemset:
    """A frequent itemset after code expansion: (dimension, value) pairs.

    Pairs keep decode order (codes ascending, each combo in selected-dimension
    order, duplicates dropped); equality and lookups use the pair set.
    """

    pairs: tuple[Pair, ...]
    support_count: int
    support: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        if len(set(self.pairs)) != len(self.pairs):
            raise DataError(f"decoded itemset has duplicate pairs: {self.pairs!r}")

    @property
    def pair_set(self) -> frozenset[Pair]:
        return frozenset(self.pairs)

    @property
    def level(self) -> int:
        return len(self.pairs)


def combine_dims(
    general: RelationalTable,
    key_dim: str,
    selected_dims: Sequence[str],
    *,
    filters: Mapping[str, Iterable[str]] | None = None,
    two_pass: bool = False,
) -> tuple[MapCodeRegistry, MdTable]:
    """Assign codes to selected-dimension combinations and emit key/code pairs.

    The default single pass looks up or creates each row's code and emits the
    (key value, code) pair immediately; ``two_pass=True`` runs the original
    create-then-find structure (first loop assigns all codes, second emits the
    pairs) and produces identical output. ``filters`` restricts rows to those
    whose value for each filtered dimension is in the allowed set.
    """
    selected = tuple(selected_dims)
    if not selected:
        raise SchemaError("combine_dims needs at least one selected dimension")
    if len(set(selected)) != len(selected):
        raise SchemaError(f"selected dimensions contain duplicates: {selected}")
    if key_dim in selected:
        raise SchemaError(f"key dimension {key_dim!r} cannot also be combined")
    key_pos = general.index_of(key_dim)
    sel_pos = [general.index_of(d) for d in selected]

    involved = [key_dim, *selected]
    filt: list[tuple[int, frozenset[str]]] = []
    if filters:
        for dim, allowed in filters.items():
            filt.append((general.index_of(dim), frozenset(allowed)))
            involved.append(dim)
    for d in dict.fromkeys(involved):
        if not general.spec_of(d).is_categorical():
            raise SchemaError(
                f"attribute {d!r} is not categorical; discretize it before combining"
            )

    registry = MapCodeRegistry(selected)

    def kept(row: tuple) -> bool:
        return all(row[pos] in allowed for pos, allowed in filt)

    rows: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()

    if two_pass:
        for row in general.rows:
            if kept(row):
                registry.encode(tuple(row[p] for p in sel_pos))
        for row in general.rows:
            if not kept(row):
                continue
            code = registry.find(tuple(row[p] for p in sel_pos))
            assert code is not None
            pair = (row[key_pos], code)
            if pair not in seen:
                seen.add(pair)
                rows.append(pair)
    else:
        for row in general.rows:
            if not kept(row):
                continue
            code = registry.encode(tuple(row[p] for p in sel_pos))
            pair = (row[key_pos], code)
            if pair not in seen:
                seen.add(pair)
                rows.append(pair)

    return registry, MdTable(rows=tuple(rows))


def transform_map_code(
    itemsets: Sequence[FrequentItemset], registry: MapCodeRegistry
) -> list[DecodedItemset]:
    """Expand each code itemset into dimension/value pairs, supports unchanged.

    Pairs shared by several codes of one itemset are kept once, at their first
    appearance.
    """
    out: list[DecodedItemset] = []
    for fi in itemsets:
        pairs: list[Pair] = []
        seen: set[Pair] = set()
        for code in fi.items:
            for pair in registry.decode(code):
                if pair not in seen:
                    seen.add(pair)
                    pairs.append(pair)
        out.append(
            DecodedItemset(
                pairs=tuple(pairs),
                support_count=fi.support_count,
                support=fi.support,
            )
        )
    return out
