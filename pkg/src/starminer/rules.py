"""Association-rule generation from decoded frequent itemsets.

For every frequent pair set with at least two pairs, every antecedent that is
itself in the frequent list (the derivable splits) yields a candidate rule;
the consequent is the remaining pairs. Rules pass if their confidence reaches
``minconf`` and the dimension policy holds: a dimension marked ``single`` may
contribute at most one value to a rule, a ``repeatable`` one any number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DataError
from .mapcode import DecodedItemset, Pair
from .mining import exact_fraction


@dataclass(frozen=True)
class DimensionPolicy:
    """Which dimensions may occur with several values inside one rule.

    Dimensions default to ``single``; list the repeatable ones explicitly
    (classically the purchase predicate, while time or location stay single).
    """

    repeatable: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "repeatable", frozenset(self.repeatable))

    @classmethod
    def from_repeatable(cls, dims: Iterable[str]) -> "DimensionPolicy":
        return cls(repeatable=frozenset(dims))

    def is_repeatable(self, dimension: str) -> bool:
        return dimension in self.repeatable

    def allows(self, pairs: Sequence[Pair]) -> bool:
        counts: dict[str, int] = {}
        for dim, _ in pairs:
            counts[dim] = counts.get(dim, 0) + 1
        return all(n == 1 or self.is_repeatable(d) for d, n in counts.items())


@dataclass(frozen=True)
class AssociationRule:
    """antecedent -> consequent with support and confidence.

    The two sides are disjoint pair sets; ``support`` is the support of their
    union and ``confidence`` its ratio to the antecedent's support.
    """

    antecedent: tuple[Pair, ...]
    consequent: tuple[Pair, ...]
    support_count: int
    antecedent_count: int
    support: float
    confidence: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", tuple(tuple(p) for p in self.antecedent))
        object.__setattr__(self, "consequent", tuple(tuple(p) for p in self.consequent))
        if not self.antecedent or not self.consequent:
            raise DataError("rule sides must be non-empty")
        if set(self.antecedent) & set(self.consequent):
            raise DataError("rule sides must be disjoint")
        if not 0 < self.support <= self.confidence <= 1:
            raise DataError(
                f"rule must satisfy 0 < support <= confidence <= 1, got "
                f"support={self.support}, confidence={self.confidence}"
            )


def gen_rules(
    frequent: Sequence[DecodedItemset],
    minconf: float | str | Fraction,
    policy: DimensionPolicy | None = None,
) -> list[AssociationRule]:
    """Derive every rule A -> F \\ A whose antecedent A is a listed itemset.

    Confidence is computed from support counts with exact rational
    comparisons against ``minconf``. Splits whose antecedent pair set is not
    in the list are not derivable (codes combining several dimensions expand
    to pair sets with no listed proper subsets) and are skipped. A listed
    subset with a smaller count than its superset means the list is corrupt
    and raises :class:`DataError`.

    Output is sorted by support descending, then confidence descending, then
    lexicographically.
    """
    conf_min = exact_fraction(minconf)
    if not 0 < conf_min <= 1:
        raise ValueError(f"minconf must be in (0, 1], got {minconf!r}")
    if policy is None:
        policy = DimensionPolicy()

    # Deduplicate by pair set keeping the maximal count: distinct code
    # itemsets can expand to one pair set, and the larger count is the
    # tightest lower bound available for it.
    chosen: dict[frozenset[Pair], DecodedItemset] = {}
    order: list[frozenset[Pair]] = []
    for itemset in frequent:
        key = itemset.pair_set
        prev = chosen.get(key)
        if prev is None:
            chosen[key] = itemset
            order.append(key)
        elif itemset.support_count > prev.support_count:
            chosen[key] = itemset

    rules: list[AssociationRule] = []
    for fkey in order:
        full = chosen[fkey]
        if full.level < 2 or not policy.allows(full.pairs):
            continue
        for akey, ante in chosen.items():
            if not (akey < fkey):
                continue
            if ante.support_count < full.support_count:
                raise DataError(
                    f"frequent list is corrupt: subset {ante.pairs!r} has count "
                    f"{ante.support_count} below its superset's {full.support_count}"
                )
            if Fraction(full.support_count, ante.support_count) < conf_min:
                continue
            antecedent = tuple(p for p in full.pairs if p in akey)
            consequent = tuple(p for p in full.pairs if p not in akey)
            rules.append(
                AssociationRule(
                    antecedent=antecedent,
                    consequent=consequent,
                    support_count=full.support_count,
                    antecedent_count=ante.support_count,
                    support=full.support,
                    confidence=full.support_count / ante.support_count,
                )
            )

    def sort_key(r: AssociationRule):
        return (
            -r.support,
            -r.confidence,
            tuple(sorted(r.antecedent)),
            tuple(sorted(r.consequent)),
        )

    rules.sort(key=sort_key)
    return rules


def _percent(x: float) -> str:
    return f"{x * 100:.2f}".rstrip("0").rstrip(".")


def format_rule(rule: AssociationRule) -> str:
    """Render a rule as ``dim("value") ∧ … → dim("value") ∧ … {sup=P%, conf=Q%}``.

    Percentages carry up to two decimals with trailing zeros trimmed.
    """
    left = " ∧ ".join(f'{d}("{v}")' for d, v in rule.antecedent)
    right = " ∧ ".join(f'{d}("{v}")' for d, v in rule.consequent)
    return (
        f"{left} → {right} "
        f"{{sup={_percent(rule.support)}%, conf={_percent(rule.confidence)}%}}"
    )
