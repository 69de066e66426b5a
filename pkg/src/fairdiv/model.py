"""Exact-rational data model: valuations, instances, allocations.

All values are `fractions.Fraction`; no floating point ever enters a
fairness decision. Goods and agents are 1-indexed in files and 0-indexed
internally. Every type is immutable after construction, so instances can be
shared freely across workers.

Instance files are JSON::

    {"n": 2, "m": 2, "scaled": true,
     "valuations": [{"kind": "additive", "values": ["1/2", "1/2"]},
                    {"kind": "explicit", "subadditive": true,
                     "table": {"1": "1/3", "2": "1/3", "1,2": "1/2"}}]}

Rationals are "p/q" strings (plain integers allowed), explicit-table keys
are sorted comma-joined 1-based good indices, and the empty-set key ""
may be omitted (defaults to 0). Allocation files are
``{"bundles": [[1, 3], [2], []]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InfeasibleError, ParseError, ValidationError

ADDITIVE = "additive"
EXPLICIT = "explicit"

# Explicit tables are exponential in m; both caps are overridable per call.
EXPLICIT_GOODS_CAP = 20
DEMAND_QUERY_CAP = 20

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(text: str) -> Fraction:
    """Parse a "p/q" (or plain integer) string into an exact Fraction."""
    try:
        value = Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational: {text!r} ({exc})") from None
    return value


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def _good_set(goods: Iterable[int], m: int) -> frozenset[int]:
    s = frozenset(goods)
    if not all(isinstance(g, int) and 0 <= g < m for g in s):
        raise ValueError(f"good set {sorted(s)} not within 0..{m - 1}")
    return s


def _ext(goods: Iterable[int]) -> tuple[int, ...]:
    """Sorted 1-based rendering of an internal good set, for messages."""
    return tuple(sorted(g + 1 for g in goods))


@dataclass(frozen=True)
class Valuation:
    """One agent's valuation: additive (per-good values) or an explicit
    table over all 2^m subsets."""

    kind: str
    m: int
    values: tuple[Fraction, ...] | None = None
    table: Mapping[frozenset[int], Fraction] | None = None
    subadditive: bool = False

    @staticmethod
    def additive(values: Sequence[Fraction]) -> "Valuation":
        vals = tuple(Fraction(v) for v in values)
        return Valuation(kind=ADDITIVE, m=len(vals), values=vals)

    @staticmethod
    def explicit(m: int, table: Mapping[frozenset[int], Fraction],
                 subadditive: bool = False) -> "Valuation":
        if m > EXPLICIT_GOODS_CAP:
            raise ValidationError(
                "explicit-goods-cap",
                f"explicit valuation over {m} goods exceeds the cap of "
                f"{EXPLICIT_GOODS_CAP} (table size is 2^m)")
        full = {frozenset(k): Fraction(v) for k, v in table.items()}
        full.setdefault(frozenset(), ZERO)
        missing = [mask for mask in range(1 << m)
                   if frozenset(g for g in range(m) if mask >> g & 1) not in full]
        if missing:
            first = frozenset(g for g in range(m) if missing[0] >> g & 1)
            raise ParseError(
                f"explicit table misses subset {_ext(first)} "
                f"({len(missing)} of {1 << m} subsets absent)")
        return Valuation(kind=EXPLICIT, m=m, table=full, subadditive=subadditive)

    def value(self, goods: Iterable[int]) -> Fraction:
        s = _good_set(goods, self.m)
        if self.kind == ADDITIVE:
            return sum((self.values[g] for g in s), ZERO)
        return self.table[s]


def value_query(valuation: Valuation, goods: Iterable[int]) -> Fraction:
    """Exact value of a subset of goods under the given valuation."""
    return valuation.value(goods)


def demand_query(valuation: Valuation, prices: Sequence[Fraction],
                 cap: int = DEMAND_QUERY_CAP) -> frozenset[int]:
    """A profit-maximizing good set at the given nonnegative prices.

    Additive valuations: every good whose value is at least its price
    (zero-profit ties included, which keeps the all-zero-price answer at
    the full set). Explicit valuations: exhaustive search over all 2^m
    subsets, ties broken by smallest cardinality then lexicographically
    on sorted indices.
    """
    m = valuation.m
    if len(prices) != m:
        raise ValueError(f"expected {m} prices, got {len(prices)}")
    prices = [Fraction(p) for p in prices]
    if any(p < 0 for p in prices):
        raise ValueError("prices must be nonnegative")

    if valuation.kind == ADDITIVE:
        return frozenset(g for g in range(m) if valuation.values[g] >= prices[g])

    if m > cap:
        raise InfeasibleError(
            f"demand query infeasible: explicit search over 2^{m} subsets "
            f"exceeds cap of 2^{cap}")
    best_profit = None
    best_key = None
    best_set = None
    for mask in range(1 << m):
        subset = frozenset(g for g in range(m) if mask >> g & 1)
        profit = valuation.table[subset] - sum((prices[g] for g in subset), ZERO)
        key = (len(subset), tuple(sorted(subset)))
        if best_profit is None or profit > best_profit or \
                (profit == best_profit and key < best_key):
            best_profit, best_key, best_set = profit, key, subset
    return best_set


@dataclass(frozen=True)
class Instance:
    """A fair-division instance: n agents, m goods, one valuation per agent,
    and a (validated) claim that every agent values the full good set at 1."""

    n: int
    m: int
    valuations: tuple[Valuation, ...]
    scaled: bool = False

    def value(self, agent: int, goods: Iterable[int]) -> Fraction:
        return self.valuations[agent].value(goods)

    @property
    def additive(self) -> bool:
        return all(v.kind == ADDITIVE for v in self.valuations)

    def total_value(self, agent: int) -> Fraction:
        return self.valuations[agent].value(range(self.m))


@dataclass(frozen=True)
class Allocation:
    """A partition (possibly partial) of the goods into per-agent bundles."""

    bundles: tuple[frozenset[int], ...]

    @staticmethod
    def of(bundles: Iterable[Iterable[int]]) -> "Allocation":
        return Allocation(tuple(frozenset(b) for b in bundles))

    def allocated(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for b in self.bundles:
            out |= b
        return out

    def is_complete(self, m: int) -> bool:
        return self.allocated() == frozenset(range(m))


def validate_allocation(alloc: Allocation, inst: Instance,
                        require_complete: bool = False) -> None:
    """Check bundle count, good range, pairwise disjointness and (optionally)
    completeness against an instance."""
    if len(alloc.bundles) != inst.n:
        raise ValidationError(
            "bundle-count",
            f"expected {inst.n} bundles, got {len(alloc.bundles)}")
    seen: dict[int, int] = {}
    for i, bundle in enumerate(alloc.bundles):
        for g in bundle:
            if not (0 <= g < inst.m):
                raise ValidationError(
                    "good-range", f"bundle of agent {i + 1} contains good "
                    f"{g + 1} outside 1..{inst.m}", agent=i + 1)
            if g in seen:
                raise ValidationError(
                    "disjoint-bundles",
                    f"good {g + 1} appears in bundles of agents "
                    f"{seen[g] + 1} and {i + 1}",
                    witness=(g + 1,))
            seen[g] = i
    if require_complete and not alloc.is_complete(inst.m):
        missing = sorted(frozenset(range(inst.m)) - alloc.allocated())
        raise ValidationError(
            "complete", f"allocation leaves goods {_ext(missing)} unassigned",
            witness=_ext(missing))


def _validate_valuation(v: Valuation, agent: int) -> None:
    """Raise ValidationError naming the failing axiom, agent and witness."""
    label = f"agent {agent + 1}"
    if v.kind == ADDITIVE:
        if len(v.values) != v.m:
            raise ValidationError(
                "value-count", f"{label}: expected {v.m} values, got "
                f"{len(v.values)}", agent=agent + 1)
        for g, val in enumerate(v.values):
            if val < 0:
                raise ValidationError(
                    "nonnegative", f"{label}: v({g + 1}) = {val} < 0",
                    agent=agent + 1, witness=(g + 1,))
        return

    empty = v.table[frozenset()]
    if empty != 0:
        raise ValidationError(
            "normalized", f"{label}: not normalized, v({{}}) = {empty} != 0",
            agent=agent + 1, witness=())
    for subset, val in v.table.items():
        if val < 0:
            raise ValidationError(
                "nonnegative", f"{label}: v({_ext(subset)}) = {val} < 0",
                agent=agent + 1, witness=_ext(subset))
    # Monotonicity: v(S) <= v(S + {g}) for every S and g outside S.
    for mask in range(1 << v.m):
        s = frozenset(g for g in range(v.m) if mask >> g & 1)
        vs = v.table[s]
        for g in range(v.m):
            if mask >> g & 1:
                continue
            bigger = s | {g}
            if vs > v.table[bigger]:
                raise ValidationError(
                    "monotone",
                    f"{label}: v({_ext(s)}) = {vs} > v({_ext(bigger)}) = "
                    f"{v.table[bigger]}", agent=agent + 1,
                    witness=(_ext(s), _ext(bigger)))
    if v.subadditive:
        subsets = [frozenset(g for g in range(v.m) if mask >> g & 1)
                   for mask in range(1, 1 << v.m)]
        for s in subsets:
            vs = v.table[s]
            for t in subsets:
                if v.table[s | t] > vs + v.table[t]:
                    raise ValidationError(
                        "subadditive",
                        f"{label}: v({_ext(s | t)}) = {v.table[s | t]} > "
                        f"v(S) + v(T) = {vs + v.table[t]} for S = {_ext(s)}, "
                        f"T = {_ext(t)}", agent=agent + 1,
                        witness=(_ext(s), _ext(t)))


def validate_instance(inst: Instance) -> None:
    """Run every valuation axiom check and verify the scaled flag."""
    if inst.n < 1:
        raise ValidationError("agent-count", f"need at least 1 agent, got {inst.n}")
    if inst.m < 0:
        raise ValidationError("good-count", f"negative good count {inst.m}")
    if len(inst.valuations) != inst.n:
        raise ValidationError(
            "valuation-count",
            f"expected {inst.n} valuations, got {len(inst.valuations)}")
    for i, v in enumerate(inst.valuations):
        if v.m != inst.m:
            raise ValidationError(
                "good-count", f"agent {i + 1}: valuation over {v.m} goods, "
                f"instance has {inst.m}", agent=i + 1)
        _validate_valuation(v, i)
    if inst.scaled:
        for i in range(inst.n):
            total = inst.total_value(i)
            if total != 1:
                raise ValidationError(
                    "scaled", f"scaled-flag mismatch: agent {i + 1} has "
                    f"v([m]) = {total} != 1", agent=i + 1)


def _parse_subset_key(key: str, m: int) -> frozenset[int]:
    if key == "":
        return frozenset()
    try:
        goods = [int(part) for part in key.split(",")]
    except ValueError:
        raise ParseError(f"bad subset key {key!r}") from None
    if any(not 1 <= g <= m for g in goods):
        raise ParseError(f"subset key {key!r} outside goods 1..{m}")
    if len(set(goods)) != len(goods):
        raise ParseError(f"subset key {key!r} repeats a good")
    return frozenset(g - 1 for g in goods)


def _subset_key(subset: frozenset[int]) -> str:
    return ",".join(str(g + 1) for g in sorted(subset))


def _valuation_from_json(obj, m: int, agent: int) -> Valuation:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"agent {agent + 1}: valuation must be an object "
                         "with a 'kind'")
    kind = obj["kind"]
    if kind == ADDITIVE:
        vals = obj.get("values")
        if not isinstance(vals, list) or len(vals) != m:
            raise ParseError(
                f"agent {agent + 1}: additive valuation needs exactly {m} values")
        return Valuation.additive([parse_rational(v) for v in vals])
    if kind == EXPLICIT:
        table_json = obj.get("table")
        if not isinstance(table_json, dict):
            raise ParseError(f"agent {agent + 1}: explicit valuation needs a table")
        table = {_parse_subset_key(k, m): parse_rational(v)
                 for k, v in table_json.items()}
        return Valuation.explicit(m, table,
                                  subadditive=bool(obj.get("subadditive", False)))
    raise ParseError(f"agent {agent + 1}: unknown valuation kind {kind!r}")


def instance_from_json(data) -> Instance:
    try:
        n = int(data["n"])
        m = int(data["m"])
        scaled = bool(data["scaled"])
        valuations_json = data["valuations"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed instance file: {exc}") from None
    if not isinstance(valuations_json, list) or len(valuations_json) != n:
        raise ParseError(f"expected {n} valuations, got "
                         f"{len(valuations_json) if isinstance(valuations_json, list) else 'non-list'}")
    valuations = tuple(_valuation_from_json(obj, m, i)
                       for i, obj in enumerate(valuations_json))
    inst = Instance(n=n, m=m, valuations=valuations, scaled=scaled)
    validate_instance(inst)
    return inst


def instance_to_json(inst: Instance) -> dict:
    vals = []
    for v in inst.valuations:
        if v.kind == ADDITIVE:
            vals.append({"kind": ADDITIVE,
                         "values": [format_rational(x) for x in v.values]})
        else:
            table = {_subset_key(s): format_rational(x)
                     for s, x in v.table.items() if s}
            vals.append({"kind": EXPLICIT, "subadditive": v.subadditive,
                         "table": table})
    return {"n": inst.n, "m": inst.m, "scaled": inst.scaled, "valuations": vals}


def load_instance(path) -> Instance:
    """Load and fully validate an instance file."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return instance_from_json(data)


def save_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_json(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")


def allocation_from_json(data) -> Allocation:
    try:
        bundles_json = data["bundles"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed allocation file: {exc}") from None
    bundles = []
    for b in bundles_json:
        goods = []
        for g in b:
            if not isinstance(g, int) or g < 1:
                raise ParseError(f"bad good index {g!r} (goods are 1-based)")
            goods.append(g - 1)
        bundles.append(frozenset(goods))
    return Allocation(tuple(bundles))


def allocation_to_json(alloc: Allocation) -> dict:
    return {"bundles": [[g + 1 for g in sorted(b)] for b in alloc.bundles]}


def load_allocation(path) -> Allocation:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return allocation_from_json(data)


def save_allocation(alloc: Allocation, path) -> None:
    with open(path, "w") as fh:
        json.dump(allocation_to_json(alloc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def rescale_instance(inst: Instance) -> Instance:
    """Divide each agent's additive values by her full-set value so the
    result is scaled. Rescaling is always explicit, never silent: the loader
    only verifies the scaled flag, it does not normalize."""
    if not inst.additive:
        raise ValidationError("rescale", "only additive instances can be rescaled")
    new_vals = []
    for i, v in enumerate(inst.valuations):
        total = sum(v.values, ZERO)
        if total == 0:
            raise ValidationError(
                "rescale", f"agent {i + 1} values every good at 0; cannot scale",
                agent=i + 1)
        new_vals.append(Valuation.additive([x / total for x in v.values]))
    return Instance(n=inst.n, m=inst.m, valuations=tuple(new_vals), scaled=True)
