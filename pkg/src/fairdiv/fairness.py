"""Exact fairness predicates: EF1, Prop1, alpha-MMS, and social welfare.

Each predicate returns a FairnessVerdict carrying either a machine-checkable
certificate (evidence the property holds) or a counterexample witness that
reproduces the violated inequality when replayed through value queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .errors import ValidationError
from .model import (Allocation, Instance, ADDITIVE, ZERO, format_rational,
                    validate_allocation, value_query)


@dataclass(frozen=True)
class FairnessVerdict:
    """Outcome of a fairness check.

    On success `certificate` holds per-pair (EF1) or per-agent (Prop1,
    alpha-MMS) evidence; on failure `witness` pins down the violating
    agent/pair together with every residual comparison, all as exact
    rationals.
    """

    holds: bool
    prop: str
    certificate: Optional[dict] = None
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        def conv(obj):
            if isinstance(obj, Fraction):
                return format_rational(obj)
            if isinstance(obj, frozenset):
                return sorted(g + 1 for g in obj)
            if isinstance(obj, dict):
                return {str(k): conv(v) for k, v in obj.items()}
            if isinstance(obj, (list, tuple)):
                return [conv(v) for v in obj]
            return obj

        out = {"property": self.prop, "holds": self.holds}
        if self.certificate is not None:
            out["certificate"] = conv(self.certificate)
        if self.witness is not None:
            out["witness"] = conv(self.witness)
        return out


def social_welfare(inst: Instance, alloc: Allocation) -> Fraction:
    """Sum of each agent's value for her own bundle."""
    validate_allocation(alloc, inst)
    return sum((inst.value(i, alloc.bundles[i]) for i in range(inst.n)), ZERO)


def _best_removal(inst: Instance, i: int, bundle: frozenset[int]):
    """Good whose removal shrinks agent i's view of `bundle` the most,
    with the resulting residual value. Lowest good index wins ties."""
    v = inst.valuations[i]
    if v.kind == ADDITIVE:
        top = max(v.values[x] for x in bundle)
        g = min(x for x in bundle if v.values[x] == top)
        return g, v.value(bundle) - v.values[g]
    best_g, best_res = None, None
    for g in sorted(bundle):
        res = v.value(bundle - {g})
        if best_res is None or res < best_res:
            best_g, best_res = g, res
    return best_g, best_res


def is_ef1(inst: Instance, alloc: Allocation) -> FairnessVerdict:
    """Envy-freeness up to one good; accepts partial allocations.

    Holds iff for every ordered pair (i, j) with a nonempty bundle B_j there
    is a good g in B_j with v_i(own) >= v_i(B_j - {g}). The certificate
    records one such g per pair; a failure witness lists the residual value
    of every single-good removal so it can be replayed.
    """
    validate_allocation(alloc, inst)
    certificate: dict = {}
    for i in range(inst.n):
        own = inst.value(i, alloc.bundles[i])
        for j in range(inst.n):
            if j == i or not alloc.bundles[j]:
                continue
            g, residual = _best_removal(inst, i, alloc.bundles[j])
            if own >= residual:
                certificate[(i + 1, j + 1)] = g + 1
            else:
                comparisons = [
                    {"removed": h + 1,
                     "residual": inst.value(i, alloc.bundles[j] - {h}),
                     "own": own}
                    for h in sorted(alloc.bundles[j])]
                return FairnessVerdict(
                    holds=False, prop="ef1",
                    witness={"i": i + 1, "j": j + 1,
                             "own": own, "comparisons": comparisons})
    return FairnessVerdict(holds=True, prop="ef1", certificate=certificate)


def is_prop1(inst: Instance, alloc: Allocation,
             agents: Optional[Iterable[int]] = None,
             goods: Optional[Iterable[int]] = None) -> FairnessVerdict:
    """Proportionality up to one good, optionally scoped to a sub-instance.

    With scope <A, G> the threshold is v_i(G)/|A| and the hypothetical good
    ranges over all of G, allocated or not. Default scope is all agents and
    all goods. An agent whose own bundle already meets the threshold passes
    outright (by monotonicity any good would do), which also settles the
    vacuous empty-G case.
    """
    validate_allocation(alloc, inst)
    scope_agents = sorted(agents) if agents is not None else list(range(inst.n))
    scope_goods = sorted(goods) if goods is not None else list(range(inst.m))
    if not scope_agents:
        raise ValueError("prop1 scope needs at least one agent")
    k = len(scope_agents)
    certificate: dict = {}
    for i in scope_agents:
        threshold = inst.value(i, scope_goods) / k
        own = inst.value(i, alloc.bundles[i])
        if own >= threshold:
            certificate[i + 1] = {"good": scope_goods[0] + 1 if scope_goods else None,
                                  "value": own, "threshold": threshold}
            continue
        found = None
        for g in scope_goods:
            boosted = inst.value(i, alloc.bundles[i] | {g})
            if boosted >= threshold:
                found = (g, boosted)
                break
        if found is None:
            comparisons = [
                {"added": g + 1,
                 "value": inst.value(i, alloc.bundles[i] | {g}),
                 "threshold": threshold}
                for g in scope_goods]
            return FairnessVerdict(
                holds=False, prop="prop1",
                witness={"agent": i + 1, "own": own, "threshold": threshold,
                         "comparisons": comparisons})
        certificate[i + 1] = {"good": found[0] + 1, "value": found[1],
                              "threshold": threshold}
    return FairnessVerdict(holds=True, prop="prop1", certificate=certificate)


def is_alpha_mms(inst: Instance, alloc: Allocation, alpha: Fraction,
                 profile) -> FairnessVerdict:
    """alpha-approximate maximin share fairness against an exact MMS profile."""
    validate_allocation(alloc, inst)
    alpha = Fraction(alpha)
    mms = profile.mms
    if mms is None:
        raise ValidationError(
            "mms-profile", "missing profile entry: exact MMS values required")
    if len(mms) != inst.n:
        raise ValidationError(
            "mms-profile", f"profile has {len(mms)} entries, instance has "
            f"{inst.n} agents")
    certificate: dict = {}
    for i in range(inst.n):
        own = inst.value(i, alloc.bundles[i])
        bound = alpha * mms[i]
        if own < bound:
            return FairnessVerdict(
                holds=False, prop="alpha-mms",
                witness={"agent": i + 1, "own": own, "alpha": alpha,
                         "mms": mms[i], "required": bound})
        certificate[i + 1] = {"own": own, "required": bound}
    return FairnessVerdict(holds=True, prop="alpha-mms", certificate=certificate)
