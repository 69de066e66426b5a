"""Half-maximin-share solvers for additive valuations: the greedy
singleton-plus-Prop1 absolute-welfare algorithm, the line-accumulation
high-welfare algorithm, and the case-split combination.

The absolute algorithm repeatedly hands the highest-valued "large" good
(one worth at least half the per-capita remainder to its taker) to that
taker, then splits what is left among the remaining agents with a
round-robin Prop1 allocation. Its output is 1/2-MMS with welfare at least
(1/3n) * sum_i v_i(all goods).

The high-welfare algorithm works on scaled instances against a
welfare-maximizing reference allocation W*. It tracks a permanent set P
(agents holding at least (1/(3 sqrt n)) of their reference-bundle value,
frozen thereafter) and a temporary set T (agents holding at least half
their maximin estimate Z_i but short of the welfare threshold). After
triaging zero-MMS agents and single-good winners it sweeps the goods in
reference order, growing an accumulator bundle that is swapped to
temporary agents or assigned to uncovered ones as soon as it crosses
their thresholds. At termination P and T cover all agents, |T| stays
within 4*sqrt(n), and 3*sqrt(n)*SW + 4*sqrt(n) >= OPT.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import debug
from .ef1 import LineOrder
from .errors import ValidationError
from .exact import sqrt_ge
from .fairness import is_prop1, social_welfare
from .model import Allocation, Instance, ZERO
from .oracles import (DEFAULT_MMS_STATE_CAP, MmsProfile, max_welfare,
                      mms_profile)


def _require_additive(inst: Instance, who: str) -> None:
    if not inst.additive:
        raise ValidationError("additive",
                              f"{who} supports additive valuations only")


def prop1_subroutine(inst: Instance, agents: Iterable[int],
                     goods: Iterable[int]) -> Allocation:
    """Round-robin allocation of `goods` among `agents`: in ascending agent
    order, each picks her most-valued remaining good (lowest index on ties)
    until the goods run out. The result satisfies Prop1 scoped to the
    sub-instance."""
    _require_additive(inst, "prop1_subroutine")
    order = sorted(agents)
    remaining = set(goods)
    bundles: list[set[int]] = [set() for _ in range(inst.n)]
    while remaining:
        for i in order:
            if not remaining:
                break
            vals = inst.valuations[i].values
            top = max(vals[g] for g in remaining)
            pick = min(g for g in remaining if vals[g] == top)
            bundles[i].add(pick)
            remaining.remove(pick)
    return Allocation.of(bundles)


@dataclass
class MmsAbsRun:
    allocation: Allocation
    # (agent, good, active agents before, remaining goods before), in
    # assignment order; feeds the per-iteration share-accounting checks.
    singleton_trace: list[tuple[int, int, tuple[int, ...], tuple[int, ...]]]
    leftover_dump: Optional[int] = None       # agent absorbing goods when
                                              # every agent got a singleton


def run_mms_abs(inst: Instance) -> MmsAbsRun:
    _require_additive(inst, "alg_mms_abs")
    active = set(range(inst.n))
    remaining = set(range(inst.m))
    totals = [sum((inst.valuations[i].values[g] for g in remaining), ZERO)
              for i in range(inst.n)]
    bundles: list[set[int]] = [set() for _ in range(inst.n)]
    trace: list[tuple[int, int, tuple[int, ...], tuple[int, ...]]] = []

    while True:
        best = None           # (value, agent, good)
        k = len(active)
        for i in sorted(active):
            vals = inst.valuations[i].values
            for g in sorted(remaining):
                if 2 * k * vals[g] >= totals[i]:
                    if best is None or vals[g] > best[0]:
                        best = (vals[g], i, g)
        if best is None:
            break
        _, agent, good = best
        trace.append((agent, good, tuple(sorted(active)),
                      tuple(sorted(remaining))))
        bundles[agent] = {good}
        active.remove(agent)
        remaining.remove(good)
        for i in active:
            totals[i] -= inst.valuations[i].values[good]

    leftover_dump = None
    if active:
        rest = prop1_subroutine(inst, active, remaining)
        for i in active:
            bundles[i] = set(rest.bundles[i])
        if debug.checks_enabled() and remaining:
            scoped = is_prop1(inst, Allocation.of(bundles),
                              agents=sorted(active), goods=sorted(remaining))
            assert scoped.holds
    elif remaining:
        # Every agent took a singleton before the goods ran out; park the
        # leftovers with the last taker (extra goods only raise her value,
        # so both guarantees survive).
        leftover_dump = trace[-1][0]
        bundles[leftover_dump] |= remaining

    return MmsAbsRun(allocation=Allocation.of(bundles),
                     singleton_trace=trace, leftover_dump=leftover_dump)


def alg_mms_abs(inst: Instance) -> Allocation:
    """1/2-MMS allocation with welfare >= (1/3n) * sum_i v_i([m])."""
    return run_mms_abs(inst).allocation


@dataclass
class MmsHighRun:
    allocation: Allocation
    permanent: frozenset[int]
    temporary: frozenset[int]
    # (event, agent, bundle goods 0-based sorted, set label) in order.
    trace: list[tuple[str, int, tuple[int, ...], str]]
    line_order: LineOrder
    reference: Allocation
    gamma_single: frozenset[int]
    gamma_hard: frozenset[int]


def _assert_state(inst: Instance, z, wstar_val, bundles, perm, temp, n):
    assert not (perm & temp)
    for i in perm:
        bval = sum((inst.valuations[i].values[g] for g in bundles[i]), ZERO)
        assert sqrt_ge(3 * bval, wstar_val[i], n)
    for i in perm | temp:
        bval = sum((inst.valuations[i].values[g] for g in bundles[i]), ZERO)
        assert 2 * bval >= z[i]


def run_mms_high(inst: Instance, profile: MmsProfile) -> MmsHighRun:
    _require_additive(inst, "alg_mms_high")
    if not inst.scaled:
        raise ValidationError("scaled",
                              "alg_mms_high requires a scaled instance")
    n, m = inst.n, inst.m
    z = [profile.z(i) for i in range(n)]
    if len(z) != n:
        raise ValidationError("mms-profile",
                              f"profile covers {len(z)} agents, need {n}")

    wstar, _ = max_welfare(inst)
    line = LineOrder.from_reference(wstar.bundles, m)
    owner = [0] * m
    for i, bundle in enumerate(wstar.bundles):
        for g in bundle:
            owner[g] = i
    wstar_val = [inst.value(i, wstar.bundles[i]) for i in range(n)]

    bundles: list[set[int]] = [set() for _ in range(n)]
    perm: set[int] = set()
    temp: set[int] = set()
    trace: list[tuple[str, int, tuple[int, ...], str]] = []

    def note(event: str, agent: int, dest: str):
        trace.append((event, agent, tuple(sorted(bundles[agent])), dest))
        if debug.checks_enabled():
            _assert_state(inst, z, wstar_val, bundles, perm, temp, n)

    def bundle_value(agent: int, goods) -> Fraction:
        vals = inst.valuations[agent].values
        return sum((vals[g] for g in goods), ZERO)

    # Zero-MMS triage. For additive valuations MMS_i = 0 exactly when agent
    # i values fewer than n goods positively, so no oracle call is needed.
    for i in range(n):
        positives = sum(1 for g in range(m)
                        if inst.valuations[i].values[g] > 0)
        if positives < n:
            if z[i] != 0:
                raise ValidationError(
                    "mms-profile", f"agent {i + 1} has zero maximin share "
                    f"but estimate {z[i]}", agent=i + 1)
            if wstar_val[i] == 0:
                perm.add(i)
                note("zero-mms", i, "P")
            else:
                temp.add(i)
                note("zero-mms", i, "T")

    gamma_single = frozenset(
        i for i in range(n)
        if not sqrt_ge(3 * z[i], 2 * wstar_val[i], n)
        and any(sqrt_ge(3 * inst.valuations[i].values[g], wstar_val[i], n)
                for g in wstar.bundles[i]))
    gamma_hard = frozenset(
        i for i in range(n)
        if not sqrt_ge(3 * z[i], 2 * wstar_val[i], n)
        and all(not sqrt_ge(3 * inst.valuations[i].values[g], wstar_val[i], n)
                for g in wstar.bundles[i]))

    for i in sorted(gamma_single):
        vals = inst.valuations[i].values
        top = max(vals[g] for g in wstar.bundles[i])
        pick = min(g for g in wstar.bundles[i] if vals[g] == top)
        bundles[i] = {pick}
        perm.add(i)
        temp.discard(i)
        note("single", i, "P")

    def assigned_goods() -> set[int]:
        out: set[int] = set()
        for b in bundles:
            out |= b
        return out

    # Hand single goods to uncovered agents while any good alone clears
    # half their estimate; lowest agent first, then lowest line position.
    while True:
        taken = assigned_goods()
        free_agents = [a for a in range(n) if a not in perm and a not in temp]
        pick = None
        for a in free_agents:
            vals = inst.valuations[a].values
            for p in range(m):
                h = line.order[p]
                if h in taken:
                    continue
                if 2 * vals[h] >= z[a]:
                    pick = (a, h)
                    break
            if pick:
                break
        if pick is None:
            break
        a, h = pick
        bundles[a] = {h}
        if sqrt_ge(3 * inst.valuations[a].values[h], wstar_val[a], n):
            perm.add(a)
            note("singleton-loop", a, "P")
        else:
            temp.add(a)
            note("singleton-loop", a, "T")

    # Sweep the line order, accumulating still-unassigned goods into K.
    snapshot_remaining = frozenset(range(m)) - assigned_goods()
    acc: set[int] = set()
    for p in range(m):
        g = line.order[p]
        if g not in snapshot_remaining:
            continue
        acc.add(g)

        i = owner[g]
        if i in temp and sqrt_ge(3 * bundle_value(i, acc), wstar_val[i], n):
            bundles[i], acc = acc, bundles[i]
            perm.add(i)
            temp.discard(i)
            note("swap", i, "P")

        cand = None
        for a in range(n):
            if a in perm or a in temp:
                continue
            if 2 * bundle_value(a, acc) >= z[a]:
                cand = a
                break
        if cand is not None:
            bundles[cand] = acc
            acc = set()
            if sqrt_ge(3 * bundle_value(cand, bundles[cand]),
                       wstar_val[cand], n):
                perm.add(cand)
                note("accumulate", cand, "P")
            else:
                temp.add(cand)
                note("accumulate", cand, "T")

    leftover = frozenset(range(m)) - assigned_goods()
    for g in sorted(leftover):
        bundles[owner[g]].add(g)
    if leftover:
        for i in sorted({owner[g] for g in leftover}):
            trace.append(("leftover", i, tuple(sorted(bundles[i])),
                          "P" if i in perm else ("T" if i in temp else "-")))

    return MmsHighRun(allocation=Allocation.of(bundles),
                      permanent=frozenset(perm), temporary=frozenset(temp),
                      trace=trace, line_order=line, reference=wstar,
                      gamma_single=gamma_single, gamma_hard=gamma_hard)


def alg_mms_high(inst: Instance, profile: MmsProfile) -> Allocation:
    """(1/2 - eps)-MMS allocation on a scaled additive instance satisfying
    3*sqrt(n)*SW + 4*sqrt(n) >= OPT."""
    return run_mms_high(inst, profile).allocation


@dataclass
class SolveHalfMmsRun:
    allocation: Allocation
    branch: str                    # "abs" or "high"
    welfare: Fraction
    opt: Fraction
    abs_run: Optional[MmsAbsRun] = None
    high_run: Optional[MmsHighRun] = None


def run_solve_half_mms(inst: Instance, epsilon: Fraction = ZERO,
                       profile: Optional[MmsProfile] = None,
                       mms_cap: int = DEFAULT_MMS_STATE_CAP) -> SolveHalfMmsRun:
    _require_additive(inst, "solve_half_mms")
    _, opt = max_welfare(inst)
    # The high branch pays off only when OPT exceeds 5*sqrt(n); below that
    # the absolute algorithm's welfare floor of 1/3 already achieves the
    # 15*sqrt(n) approximation on scaled instances.
    if inst.scaled and not sqrt_ge(Fraction(5), opt, inst.n):
        if profile is None:
            profile = mms_profile(inst, epsilon=epsilon, cap=mms_cap)
        high = run_mms_high(inst, profile)
        return SolveHalfMmsRun(allocation=high.allocation, branch="high",
                               welfare=social_welfare(inst, high.allocation),
                               opt=opt, high_run=high)
    abs_run = run_mms_abs(inst)
    return SolveHalfMmsRun(allocation=abs_run.allocation, branch="abs",
                           welfare=social_welfare(inst, abs_run.allocation),
                           opt=opt, abs_run=abs_run)


def solve_half_mms(inst: Instance, epsilon: Fraction = ZERO,
                   profile: Optional[MmsProfile] = None,
                   mms_cap: int = DEFAULT_MMS_STATE_CAP) -> Allocation:
    """(1/2 - eps)-MMS solver: welfare >= OPT/(15*sqrt(n)) on scaled
    instances, >= (1/3n) * sum_i v_i([m]) otherwise."""
    return run_solve_half_mms(inst, epsilon=epsilon, profile=profile,
                              mms_cap=mms_cap).allocation
