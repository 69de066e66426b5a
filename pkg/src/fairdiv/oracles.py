"""Brute-force ground truth: exact MMS values, exact maximum welfare, and
exact fairness-constrained optimal welfare on small instances.

The MMS oracle enumerates k-partitions depth-first over bitmasks with
first-good symmetry breaking, best-min bound pruning, and memoization on
(remaining goods, bundles left). Values are cleared to integers per agent
(MMS only ever compares one agent's values), so the inner loop is pure
integer arithmetic. The constrained-optimum search scans all n^m complete
allocations with an upper-bound prune from per-good maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Optional

from .errors import InfeasibleError, ValidationError
from .fairness import is_alpha_mms, is_ef1, is_prop1
from .model import (ADDITIVE, Allocation, Instance, Valuation, ZERO,
                    value_query)

# Feasibility is judged on the k^|G| partition-state bound; the memoized DP
# itself touches at most k * 3^|G| states.
DEFAULT_MMS_STATE_CAP = 10 ** 9
DEFAULT_ENUM_CAP = 2 * 10 ** 7


@dataclass(frozen=True)
class MmsProfile:
    """Per-agent maximin shares and the estimates fed to the solvers.

    `mms` holds exact oracle values. `estimates` (Z_i) default to the exact
    values; a nonzero epsilon degrades them deterministically to
    (1 - eps) * MMS_i, which simulates an approximation scheme. Profiles
    built from injected estimates alone (no exact values) are allowed for
    instances beyond the oracle cap; predicates that need exact values
    reject them.
    """

    mms: Optional[tuple[Fraction, ...]]
    estimates: Optional[tuple[Fraction, ...]] = None
    epsilon: Fraction = ZERO

    def __post_init__(self):
        if self.mms is None and self.estimates is None:
            raise ValidationError("mms-profile", "profile needs mms values "
                                  "or injected estimates")
        if not (0 <= self.epsilon < 1):
            raise ValidationError("mms-profile",
                                  f"epsilon {self.epsilon} outside [0, 1)")
        if self.mms is not None and self.estimates is not None:
            lo = 1 - self.epsilon
            for i, (exact, z) in enumerate(zip(self.mms, self.estimates)):
                if not (lo * exact <= z <= exact):
                    raise ValidationError(
                        "mms-profile",
                        f"estimate Z_{i + 1} = {z} outside "
                        f"[(1-eps)*MMS, MMS] = [{lo * exact}, {exact}]",
                        agent=i + 1)

    def z(self, agent: int) -> Fraction:
        if self.estimates is not None:
            return self.estimates[agent]
        return self.mms[agent]


def injected_profile(estimates: Iterable[Fraction],
                     epsilon: Fraction = ZERO) -> MmsProfile:
    """Profile carrying caller-supplied estimates only.

    The caller must guarantee each estimate is a genuine lower bound on the
    agent's maximin share (e.g. the minimum bundle of any concrete
    partition); nothing here can verify that without the exact oracle.
    """
    return MmsProfile(mms=None,
                      estimates=tuple(Fraction(z) for z in estimates),
                      epsilon=Fraction(epsilon))


def _scaled_subset_values(valuation: Valuation,
                          goods: list[int]) -> tuple[list[int], int]:
    """Integer values of every subset of `goods` (as bitmask-indexed list)
    plus the common denominator that was cleared."""
    k = len(goods)
    if valuation.kind == ADDITIVE:
        fracs = [valuation.values[g] for g in goods]
        scale = lcm(*(f.denominator for f in fracs)) if fracs else 1
        ints = [int(f * scale) for f in fracs]
        sums = [0] * (1 << k)
        for mask in range(1, 1 << k):
            low = mask & -mask
            sums[mask] = sums[mask ^ low] + ints[low.bit_length() - 1]
        return sums, scale
    fracs = {}
    for mask in range(1 << k):
        subset = frozenset(goods[b] for b in range(k) if mask >> b & 1)
        fracs[mask] = valuation.value(subset)
    scale = lcm(*(f.denominator for f in fracs.values()))
    return [int(fracs[mask] * scale) for mask in range(1 << k)], scale


def mms_k(valuation: Valuation, k: int, goods: Optional[Iterable[int]] = None,
          cap: int = DEFAULT_MMS_STATE_CAP) -> Fraction:
    """Exact max over k-partitions of `goods` of the minimum bundle value.

    The agent's full maximin share is mms_k(v, n, all goods).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    glist = sorted(goods) if goods is not None else list(range(valuation.m))
    # Constant-time outcomes first; only genuine enumeration hits the cap.
    if k == 1:
        return valuation.value(glist)
    if len(glist) < k:
        return ZERO
    if valuation.value(glist) == 0:
        return ZERO
    if valuation.kind == ADDITIVE:
        positive = sum(1 for g in glist if valuation.values[g] > 0)
        if positive < k:
            return ZERO
    if k ** max(len(glist), 1) > cap:
        raise InfeasibleError(
            f"oracle infeasible: {k}^{len(glist)} partition states exceed "
            f"cap {cap}")

    val, scale = _scaled_subset_values(valuation, glist)
    additive = valuation.kind == ADDITIVE
    memo: dict[tuple[int, int], int] = {}

    def best(mask: int, parts: int) -> int:
        if parts == 1:
            return val[mask]
        if mask.bit_count() < parts:
            return 0
        key = (mask, parts)
        cached = memo.get(key)
        if cached is not None:
            return cached
        low = mask & -mask
        rest = mask ^ low
        top = 0
        whole = val[mask]
        sub = rest
        while True:
            s = sub | low
            vs = val[s]
            if vs > top:
                other_mask = mask ^ s
                # For additive values the complement averages to at most
                # val/(parts-1) per bundle, so a too-small complement can
                # never raise the running best.
                if not additive or val[other_mask] > (parts - 1) * top:
                    other = best(other_mask, parts - 1)
                    cand = vs if vs < other else other
                    if cand > top:
                        top = cand
                        if additive and parts * top >= whole:
                            break
            if sub == 0:
                break
            sub = (sub - 1) & rest
        memo[key] = top
        return top

    result = best((1 << len(glist)) - 1, k)
    return Fraction(result, scale)


def mms_lower_bound(valuation: Valuation, k: int,
                    goods: Optional[Iterable[int]] = None) -> Fraction:
    """Certified lower bound on mms_k: the minimum bundle value of a greedy
    largest-first partition. Any concrete partition's minimum is a valid
    lower bound, so this never needs the exhaustive oracle."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    glist = sorted(goods) if goods is not None else list(range(valuation.m))
    bundles: list[set[int]] = [set() for _ in range(k)]
    if valuation.kind == ADDITIVE:
        totals = [ZERO] * k
        order = sorted(glist, key=lambda g: (-valuation.values[g], g))
        for g in order:
            j = min(range(k), key=lambda b: (totals[b], b))
            bundles[j].add(g)
            totals[j] += valuation.values[g]
        return min(totals)
    order = sorted(glist, key=lambda g: (-valuation.value({g}), g))
    for g in order:
        j = min(range(k), key=lambda b: (valuation.value(bundles[b]), b))
        bundles[j].add(g)
    return min(valuation.value(b) for b in bundles)


def mms_profile(inst: Instance, epsilon: Fraction = ZERO,
                cap: int = DEFAULT_MMS_STATE_CAP) -> MmsProfile:
    """Exact MMS_i for every agent, with estimates Z_i = MMS_i (epsilon 0)
    or the deterministic degradation Z_i = (1 - eps) * MMS_i."""
    epsilon = Fraction(epsilon)
    if not (0 <= epsilon < 1):
        raise ValidationError("mms-profile", f"epsilon {epsilon} outside [0, 1)")
    exact = tuple(mms_k(inst.valuations[i], inst.n, cap=cap)
                  for i in range(inst.n))
    estimates = tuple((1 - epsilon) * x for x in exact)
    return MmsProfile(mms=exact, estimates=estimates, epsilon=epsilon)


def max_welfare(inst: Instance,
                cap: int = DEFAULT_ENUM_CAP) -> tuple[Allocation, Fraction]:
    """A social-welfare-maximizing complete allocation and its welfare.

    Additive instances: each good goes to the agent valuing it most (ties to
    the lowest agent index), which is exact because welfare separates per
    good. Explicit instances: exhaustive scan over all n^m assignments,
    first-in-lexicographic-order optimum kept.
    """
    if inst.additive:
        bundles = [set() for _ in range(inst.n)]
        opt = ZERO
        for g in range(inst.m):
            vals = [inst.valuations[i].values[g] for i in range(inst.n)]
            top = max(vals)
            winner = vals.index(top)
            bundles[winner].add(g)
            opt += top
        return Allocation.of(bundles), opt

    if inst.n ** inst.m > cap:
        raise InfeasibleError(
            f"oracle infeasible: {inst.n}^{inst.m} allocations exceed cap {cap}")
    best_welfare = None
    best_assign = None
    for assign in product(range(inst.n), repeat=inst.m):
        bundles = _bundles_of(assign, inst.n)
        welfare = sum((inst.value(i, bundles[i]) for i in range(inst.n)), ZERO)
        if best_welfare is None or welfare > best_welfare:
            best_welfare, best_assign = welfare, assign
    alloc = Allocation.of(_bundles_of(best_assign, inst.n))
    return alloc, best_welfare


def _bundles_of(assign: tuple[int, ...], n: int) -> list[frozenset[int]]:
    out: list[set[int]] = [set() for _ in range(n)]
    for g, agent in enumerate(assign):
        out[agent].add(g)
    return [frozenset(b) for b in out]


PROPERTIES = ("ef1", "prop1", "alpha-mms")


def _property_checker(inst: Instance, prop: str, alpha, profile,
                      mms_cap: int):
    if prop == "ef1":
        return lambda alloc: is_ef1(inst, alloc).holds
    if prop == "prop1":
        return lambda alloc: is_prop1(inst, alloc).holds
    if prop == "alpha-mms":
        alpha = Fraction(alpha if alpha is not None else Fraction(1, 2))
        prof = profile if profile is not None else mms_profile(inst, cap=mms_cap)
        return lambda alloc: is_alpha_mms(inst, alloc, alpha, prof).holds
    raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTIES}")


def constrained_opt(inst: Instance, prop: str, alpha=None, profile=None,
                    cap: int = DEFAULT_ENUM_CAP,
                    mms_cap: int = DEFAULT_MMS_STATE_CAP
                    ) -> Optional[tuple[Allocation, Fraction]]:
    """Max-welfare complete allocation satisfying the given property, by
    exhaustive scan. Returns None when no allocation satisfies it (possible
    only for alpha-mms)."""
    if inst.m > 0 and inst.n ** inst.m > cap:
        raise InfeasibleError(
            f"oracle infeasible: {inst.n}^{inst.m} allocations exceed cap {cap}")
    passes = _property_checker(inst, prop, alpha, profile, mms_cap)

    # Upper bound per good for the prune: valid for additive welfare and for
    # explicit tables flagged subadditive; otherwise no prune is sound
    # (supermodular tables can gain more than single-good values suggest).
    additive = inst.additive
    prunable = additive or all(
        v.kind != ADDITIVE and v.subadditive for v in inst.valuations)
    good_max = [max(inst.value(i, {g}) for i in range(inst.n))
                for g in range(inst.m)]
    suffix_max = [ZERO] * (inst.m + 1)
    for g in range(inst.m - 1, -1, -1):
        suffix_max[g] = suffix_max[g + 1] + good_max[g]

    best_welfare: Optional[Fraction] = None
    best_assign = None
    assign = [0] * inst.m

    def current_welfare(bundles: list[set[int]]) -> Fraction:
        return sum((inst.value(i, bundles[i]) for i in range(inst.n)), ZERO)

    def search(pos: int, bundles: list[set[int]], partial: Fraction):
        nonlocal best_welfare, best_assign
        if pos == inst.m:
            welfare = partial if additive else current_welfare(bundles)
            if best_welfare is None or welfare > best_welfare:
                if passes(Allocation.of(bundles)):
                    best_welfare = welfare
                    best_assign = tuple(assign)
            return
        if prunable and best_welfare is not None:
            sofar = partial if additive else current_welfare(bundles)
            if sofar + suffix_max[pos] <= best_welfare:
                return
        for agent in range(inst.n):
            gain = inst.valuations[agent].values[pos] if additive else ZERO
            assign[pos] = agent
            bundles[agent].add(pos)
            search(pos + 1, bundles, partial + gain)
            bundles[agent].remove(pos)

    search(0, [set() for _ in range(inst.n)], ZERO)
    if best_assign is None:
        return None
    return Allocation.of(_bundles_of(best_assign, inst.n)), best_welfare


def price_of_fairness(inst: Instance, prop: str, alpha=None, profile=None,
                      cap: int = DEFAULT_ENUM_CAP,
                      mms_cap: int = DEFAULT_MMS_STATE_CAP):
    """This instance's contribution to the price of fairness: OPT divided by
    the best welfare among property-satisfying allocations. Returns
    math.inf when the fairness constraint forces zero welfare but OPT is
    positive."""
    _, opt = max_welfare(inst, cap=cap)
    constrained = constrained_opt(inst, prop, alpha=alpha, profile=profile,
                                  cap=cap, mms_cap=mms_cap)
    if constrained is None or constrained[1] == 0:
        if opt > 0:
            return math.inf
        return Fraction(1)
    return opt / constrained[1]
