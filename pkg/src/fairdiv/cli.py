"""Command-line interface.

Subcommands::

    fairdiv gen --family ef1-unscaled --n 4 -o inst.json
    fairdiv gen --family random --n 4 --m 7 --seed 42 -o inst.json
    fairdiv check --property ef1 --instance f.json --allocation a.json
    fairdiv solve --alg ef1 --instance f.json -o alloc.json [--trace]
    fairdiv solve --alg half-mms --instance f.json --epsilon 1/10 -o a.json
    fairdiv mms --instance f.json [--epsilon p/q]
    fairdiv pof --instance f.json --property ef1
    fairdiv rescale --instance f.json -o scaled.json
    fairdiv experiment --config exp.json -o report/

`check` exits 0 when the property holds and 1 when it fails, printing the
JSON verdict either way.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .errors import FairdivError
from .experiment import load_config, run_experiment
from .fairness import is_alpha_mms, is_ef1, is_prop1
from .generators import (ADVERSARIAL_FAMILIES, RANDOM_DISTRIBUTIONS,
                         FamilySpec, generate_adversarial, generate_random,
                         generate_random_subadditive)
from .mms import run_solve_half_mms
from .ef1 import run_solve_ef1
from .model import (allocation_to_json, format_rational, instance_to_json,
                    load_allocation, load_instance, parse_rational,
                    rescale_instance, save_allocation, save_instance)
from .oracles import max_welfare, mms_profile, price_of_fairness


def _emit(data) -> None:
    json.dump(data, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _cmd_gen(args) -> int:
    if args.family in ADVERSARIAL_FAMILIES:
        eps = parse_rational(args.epsilon) if args.epsilon else None
        inst = generate_adversarial(FamilySpec(family=args.family, n=args.n,
                                               epsilon=eps))
    elif args.family == "random":
        if args.m is None:
            raise FairdivError("--m is required for random families")
        inst = generate_random(args.n, args.m, distribution=args.distribution,
                               seed=args.seed)
    elif args.family == "random-subadditive":
        if args.m is None:
            raise FairdivError("--m is required for random families")
        inst = generate_random_subadditive(args.n, args.m, seed=args.seed)
    else:
        raise FairdivError(
            f"unknown family {args.family!r}; expected one of "
            f"{ADVERSARIAL_FAMILIES + ('random', 'random-subadditive')}")
    if args.output:
        save_instance(inst, args.output)
        _emit({"family": args.family, "n": inst.n, "m": inst.m,
               "scaled": inst.scaled, "path": args.output})
    else:
        _emit(instance_to_json(inst))
    return 0


def _cmd_check(args) -> int:
    inst = load_instance(args.instance)
    alloc = load_allocation(args.allocation)
    if args.property == "ef1":
        verdict = is_ef1(inst, alloc)
    elif args.property == "prop1":
        verdict = is_prop1(inst, alloc)
    elif args.property == "mms":
        alpha = parse_rational(args.alpha)
        profile = mms_profile(inst)
        verdict = is_alpha_mms(inst, alloc, alpha, profile)
    else:
        raise FairdivError(f"unknown property {args.property!r}")
    _emit(verdict.to_json())
    return 0 if verdict.holds else 1


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    if args.alg == "ef1":
        reference = load_allocation(args.reference) if args.reference else None
        run = run_solve_ef1(inst, reference=reference)
        summary = {"algorithm": "ef1", "branch": run.branch,
                   "welfare": format_rational(run.welfare)}
        if args.trace and run.high_run is not None:
            summary["trace"] = [
                {"t": t, "agent": k + 1, "from": a + 1, "to": c + 1}
                for t, k, a, c in run.high_run.trace]
        alloc = run.allocation
    elif args.alg == "half-mms":
        eps = parse_rational(args.epsilon) if args.epsilon else Fraction(0)
        run = run_solve_half_mms(inst, epsilon=eps)
        summary = {"algorithm": "half-mms", "branch": run.branch,
                   "welfare": format_rational(run.welfare),
                   "opt": format_rational(run.opt)}
        if args.trace and run.high_run is not None:
            summary["trace"] = [
                {"event": event, "agent": agent + 1,
                 "bundle": [g + 1 for g in goods], "set": dest}
                for event, agent, goods, dest in run.high_run.trace]
        alloc = run.allocation
    else:
        raise FairdivError(f"unknown algorithm {args.alg!r}")
    if args.output:
        save_allocation(alloc, args.output)
        summary["path"] = args.output
    else:
        summary["allocation"] = allocation_to_json(alloc)["bundles"]
    _emit(summary)
    return 0


def _cmd_mms(args) -> int:
    inst = load_instance(args.instance)
    eps = parse_rational(args.epsilon) if args.epsilon else Fraction(0)
    profile = mms_profile(inst, epsilon=eps)
    _emit({"mms": [format_rational(x) for x in profile.mms],
           "estimates": [format_rational(x) for x in profile.estimates],
           "epsilon": format_rational(profile.epsilon)})
    return 0


def _cmd_pof(args) -> int:
    inst = load_instance(args.instance)
    alpha = parse_rational(args.alpha) if args.alpha else Fraction(1, 2)
    prop = "alpha-mms" if args.property == "mms" else args.property
    _, opt = max_welfare(inst)
    price = price_of_fairness(inst, prop, alpha=alpha)
    _emit({"property": args.property, "opt": format_rational(opt),
           "price": "infinite" if price == math.inf else format_rational(price),
           "price_dec": ("inf" if price == math.inf else f"{float(price):.6g}")})
    return 0


def _cmd_rescale(args) -> int:
    inst = load_instance(args.instance)
    save_instance(rescale_instance(inst), args.output)
    _emit({"path": args.output, "scaled": True})
    return 0


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    report = run_experiment(config, outdir=args.output)
    _emit({"rows": len(report.rows), "outdir": args.output})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairdiv",
        description="Exact fair-division solvers, oracles, and experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--epsilon")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--distribution", default="uniform-rational",
                   choices=RANDOM_DISTRIBUTIONS)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("check", help="check a fairness property")
    p.add_argument("--property", required=True,
                   choices=["ef1", "prop1", "mms"])
    p.add_argument("--alpha", default="1/2")
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("solve", help="run a fair-allocation solver")
    p.add_argument("--alg", required=True, choices=["ef1", "half-mms"])
    p.add_argument("--instance", required=True)
    p.add_argument("--reference")
    p.add_argument("--epsilon")
    p.add_argument("--trace", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("mms", help="exact maximin-share profile")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon")
    p.set_defaults(func=_cmd_mms)

    p = sub.add_parser("pof", help="per-instance price of fairness")
    p.add_argument("--instance", required=True)
    p.add_argument("--property", required=True,
                   choices=["ef1", "prop1", "mms"])
    p.add_argument("--alpha")
    p.set_defaults(func=_cmd_pof)

    p = sub.add_parser("rescale", help="rescale an additive instance")
    p.add_argument("--instance", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_rescale)

    p = sub.add_parser("experiment", help="run an experiment sweep")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FairdivError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
