"""Experiment orchestration: sweep instance families, run the solvers and
oracles, and assemble welfare-ratio reports that check every theorem
inequality per row.

A config file names families, size grids, solvers and caps::

    {"seed": 42,
     "solvers": ["ef1", "half-mms"],
     "epsilon": "0",
     "enum_cap": 20000000,
     "mms_state_cap": 1000000000,
     "jobs": 1,
     "trace": false,
     "families": [
       {"family": "ef1-unscaled", "n": [2, 3, 4]},
       {"family": "supermodular", "n": [3], "epsilon": "1/100"},
       {"family": "random", "distribution": "dirichlet-scaled",
        "n": [4], "m": [8], "count": 2}]}

Outputs are `results.csv` (fully deterministic: exact rationals plus 6
significant-digit decimal renderings, no timings) and `results.json`
(same rows plus runtime_ms). Oracle cells beyond the enumeration caps are
reported as "skipped", never silently omitted. A failed theorem inequality
aborts the run with the offending row and trace attached: the bounds are
proven guarantees, so any violation is an implementation bug.
"""

from __future__ import annotations

import csv
import io
import json
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import FairdivError, InfeasibleError, ParseError, ValidationError
from .exact import sqrt_ge
from .fairness import is_alpha_mms, is_ef1
from .generators import (ADVERSARIAL_FAMILIES, FamilySpec,
                         generate_adversarial, generate_random,
                         generate_random_subadditive)
from .model import Instance, ZERO, format_rational, parse_rational
from .mms import run_solve_half_mms
from .ef1 import run_solve_ef1
from .oracles import (DEFAULT_ENUM_CAP, DEFAULT_MMS_STATE_CAP,
                      constrained_opt, max_welfare, mms_profile)

SOLVERS = ("ef1", "half-mms")

BOUND_COLUMNS = (
    "ef1_holds",
    "half_mms_holds",
    "welfare_vs_total_2n",
    "welfare_vs_total_3n",
    "welfare_vs_opt_16sqrt",
    "welfare_vs_opt_15sqrt",
    "high_iters_vs_nm2",
    "lipton_steps_vs_mn2",
    "high_T_vs_4sqrt",
    "high_PT_cover",
)

CSV_COLUMNS = ("instance_id", "family", "n", "m", "solver", "opt", "opt_dec",
               "welfare", "welfare_dec", "constrained_welfare",
               "price_ratio", "price_ratio_dec", "solver_ratio",
               "solver_ratio_dec") + BOUND_COLUMNS + ("trace_path",)


class BoundViolation(FairdivError):
    """A proven theorem inequality failed on a concrete run."""

    def __init__(self, message, row=None, trace=None):
        super().__init__(message)
        self.row = row
        self.trace = trace


@dataclass
class ExperimentConfig:
    seed: int
    solvers: tuple[str, ...]
    epsilon: Fraction
    enum_cap: int
    mms_state_cap: int
    jobs: int
    trace: bool
    families: tuple[dict, ...]

    @staticmethod
    def from_json(data: dict) -> "ExperimentConfig":
        solvers = tuple(data.get("solvers", list(SOLVERS)))
        for s in solvers:
            if s not in SOLVERS:
                raise ParseError(f"unknown solver {s!r}; expected {SOLVERS}")
        families = data.get("families", [])
        if not isinstance(families, list):
            raise ParseError("'families' must be a list")
        return ExperimentConfig(
            seed=int(data.get("seed", 0)),
            solvers=solvers,
            epsilon=parse_rational(str(data.get("epsilon", "0"))),
            enum_cap=int(data.get("enum_cap", DEFAULT_ENUM_CAP)),
            mms_state_cap=int(data.get("mms_state_cap", DEFAULT_MMS_STATE_CAP)),
            jobs=int(data.get("jobs", 1)),
            trace=bool(data.get("trace", False)),
            families=tuple(families))


@dataclass
class ExperimentReport:
    rows: list[dict]

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: row.get(k, "") for k in CSV_COLUMNS})
        return buf.getvalue()

    def write(self, outdir) -> None:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(self.csv_text())
        with open(out / "results.json", "w") as fh:
            json.dump({"rows": self.rows}, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _derived_seed(base: int, family: str, n: int, m: int, index: int) -> int:
    key = f"{base}|{family}|{n}|{m}|{index}".encode()
    return zlib.crc32(key)


def _dec(value) -> str:
    """6-significant-digit decimal rendering; the exact rational next to it
    stays authoritative."""
    if value is None:
        return ""
    if value == float("inf"):
        return "inf"
    return f"{float(value):.6g}"


def _instance_jobs(config: ExperimentConfig) -> list[dict]:
    jobs = []
    for fam in config.families:
        family = fam.get("family")
        ns = fam.get("n", [])
        ns = ns if isinstance(ns, list) else [ns]
        eps = fam.get("epsilon")
        eps = parse_rational(str(eps)) if eps is not None else None
        if family in ADVERSARIAL_FAMILIES:
            for n in ns:
                jobs.append({"family": family, "n": int(n), "epsilon": eps})
        elif family in ("random", "random-subadditive"):
            ms = fam.get("m", [])
            ms = ms if isinstance(ms, list) else [ms]
            count = int(fam.get("count", 1))
            distribution = fam.get("distribution", "uniform-rational")
            for n in ns:
                for m in ms:
                    for idx in range(count):
                        jobs.append({"family": family, "n": int(n),
                                     "m": int(m), "index": idx,
                                     "distribution": distribution})
        else:
            raise ParseError(f"unknown family {family!r} in config")
    return jobs


def _build_instance(job: dict, seed: int) -> tuple[str, Instance]:
    family, n = job["family"], job["n"]
    if family in ADVERSARIAL_FAMILIES:
        spec = FamilySpec(family=family, n=n, epsilon=job.get("epsilon"))
        inst = generate_adversarial(spec)
        ident = f"{family}-n{n}"
        if job.get("epsilon") is not None:
            ident += f"-e{job['epsilon']}"
        return ident.replace("/", "_"), inst
    m, idx = job["m"], job["index"]
    derived = _derived_seed(seed, family, n, m, idx)
    if family == "random":
        inst = generate_random(n, m, distribution=job["distribution"],
                               seed=derived)
        ident = f"random-{job['distribution']}-n{n}-m{m}-i{idx}"
    else:
        inst = generate_random_subadditive(n, m, seed=derived)
        ident = f"random-subadditive-n{n}-m{m}-i{idx}"
    return ident, inst


def _check(name: str, ok: bool, row: dict, trace) -> str:
    if not ok:
        raise BoundViolation(
            f"theorem inequality {name} failed on {row['instance_id']} "
            f"(solver {row['solver']})", row=row, trace=trace)
    return "pass"


def _solver_row(ident: str, inst: Instance, solver: str,
                config: ExperimentConfig) -> dict:
    start = time.perf_counter_ns()
    row: dict = {"instance_id": ident, "solver": solver, "family": None,
                 "n": inst.n, "m": inst.m}
    for col in BOUND_COLUMNS:
        row[col] = "n/a"
    total = sum((inst.total_value(i) for i in range(inst.n)), ZERO)

    try:
        _, opt = max_welfare(inst, cap=config.enum_cap)
    except InfeasibleError:
        opt = None
    row["opt"] = format_rational(opt) if opt is not None else "skipped"
    row["opt_dec"] = _dec(opt)

    trace_blob: dict = {}
    try:
        run = (run_solve_ef1(inst, cap=config.enum_cap) if solver == "ef1"
               else run_solve_half_mms(inst, epsilon=config.epsilon,
                                       mms_cap=config.mms_state_cap))
    except (InfeasibleError, ValidationError) as exc:
        # Solver not applicable (wrong valuation class) or beyond its caps:
        # an explicit skip row, never a silent omission.
        trace_blob["skip_reason"] = str(exc)
        for col in ("welfare", "constrained_welfare", "price_ratio",
                    "solver_ratio"):
            row[col] = "skipped"
        for col in ("welfare_dec", "price_ratio_dec", "solver_ratio_dec"):
            row[col] = ""
        row["allocation"] = None
        row["runtime_ms"] = (time.perf_counter_ns() - start) // 1_000_000
        row["_trace"] = trace_blob
        return row

    # The EF1 welfare guarantees are proven for subadditive valuations only;
    # supermodular tables (where the price of EF1 is unbounded) still get
    # their EF1-ness checked but no welfare bound applies.
    subadditive_scope = inst.additive or all(
        v.kind != "additive" and v.subadditive for v in inst.valuations)

    if solver == "ef1":
        alloc, welfare = run.allocation, run.welfare
        trace_blob["branch"] = run.branch
        verdict = is_ef1(inst, alloc)
        row["ef1_holds"] = _check("ef1_holds", verdict.holds, row, trace_blob)
        if subadditive_scope:
            row["welfare_vs_total_2n"] = _check(
                "welfare_vs_total_2n", 2 * inst.n * welfare >= total, row,
                trace_blob)
        if inst.scaled and opt is not None and subadditive_scope:
            row["welfare_vs_opt_16sqrt"] = _check(
                "welfare_vs_opt_16sqrt", sqrt_ge(16 * welfare, opt, inst.n),
                row, trace_blob)
        if run.high_run is not None:
            trace_blob["high_trace"] = run.high_run.trace
            trace_blob["high_iterations"] = run.high_run.iterations
            row["high_iters_vs_nm2"] = _check(
                "high_iters_vs_nm2",
                run.high_run.iterations <= inst.n * inst.m * inst.m, row,
                trace_blob)
        steps = run.abs_run.lipton.steps
        if run.high_run is not None:
            steps = max(steps, run.high_run.lipton.steps)
        trace_blob["lipton_steps"] = steps
        row["lipton_steps_vs_mn2"] = _check(
            "lipton_steps_vs_mn2", steps <= inst.m * inst.n * inst.n, row,
            trace_blob)
        prop = "ef1"
        prop_alpha = None
    else:
        alloc, welfare = run.allocation, run.welfare
        trace_blob["branch"] = run.branch
        try:
            profile = mms_profile(inst, epsilon=config.epsilon,
                                  cap=config.mms_state_cap)
            half = Fraction(1, 2) - config.epsilon
            verdict = is_alpha_mms(inst, alloc, half, profile)
            row["half_mms_holds"] = _check("half_mms_holds", verdict.holds,
                                           row, trace_blob)
        except InfeasibleError:
            row["half_mms_holds"] = "skipped"
        row["welfare_vs_total_3n"] = _check(
            "welfare_vs_total_3n", 3 * inst.n * welfare >= total, row,
            trace_blob)
        if inst.scaled and opt is not None:
            row["welfare_vs_opt_15sqrt"] = _check(
                "welfare_vs_opt_15sqrt", sqrt_ge(15 * welfare, opt, inst.n),
                row, trace_blob)
        if run.high_run is not None:
            trace_blob["high_trace"] = [
                (event, agent + 1, [g + 1 for g in goods], dest)
                for event, agent, goods, dest in run.high_run.trace]
            tsize = len(run.high_run.temporary)
            row["high_T_vs_4sqrt"] = _check(
                "high_T_vs_4sqrt", sqrt_ge(Fraction(4), Fraction(tsize),
                                           inst.n), row, trace_blob)
            covered = run.high_run.permanent | run.high_run.temporary
            row["high_PT_cover"] = _check(
                "high_PT_cover", covered == frozenset(range(inst.n)), row,
                trace_blob)
        prop = "alpha-mms"
        prop_alpha = Fraction(1, 2) - config.epsilon

    row["welfare"] = format_rational(welfare)
    row["welfare_dec"] = _dec(welfare)

    constrained = None
    try:
        constrained = constrained_opt(inst, prop, alpha=prop_alpha,
                                      cap=config.enum_cap,
                                      mms_cap=config.mms_state_cap)
    except InfeasibleError:
        row["constrained_welfare"] = "skipped"
        row["price_ratio"] = "skipped"
        row["price_ratio_dec"] = ""
    if constrained is not None:
        cw = constrained[1]
        row["constrained_welfare"] = format_rational(cw)
        if opt is None:
            row["price_ratio"] = "skipped"
            row["price_ratio_dec"] = ""
        elif cw == 0:
            row["price_ratio"] = "inf" if opt > 0 else "1"
            row["price_ratio_dec"] = "inf" if opt > 0 else "1"
        else:
            ratio = opt / cw
            row["price_ratio"] = format_rational(ratio)
            row["price_ratio_dec"] = _dec(ratio)
    elif "constrained_welfare" not in row:
        row["constrained_welfare"] = "skipped"
        row["price_ratio"] = "skipped"
        row["price_ratio_dec"] = ""

    if opt is not None and welfare > 0:
        solver_ratio = opt / welfare
        row["solver_ratio"] = format_rational(solver_ratio)
        row["solver_ratio_dec"] = _dec(solver_ratio)
    else:
        row["solver_ratio"] = "skipped"
        row["solver_ratio_dec"] = ""

    row["allocation"] = [[g + 1 for g in sorted(b)] for b in alloc.bundles]
    row["runtime_ms"] = (time.perf_counter_ns() - start) // 1_000_000
    row["_trace"] = trace_blob
    return row


def _compute_row(args) -> dict:
    ident, inst, family, solver, config = args
    row = _solver_row(ident, inst, solver, config)
    row["family"] = family
    return row


def run_experiment(config_data, outdir=None) -> ExperimentReport:
    """Run the configured sweep and return (optionally also write) the
    report. `config_data` is a parsed config dict or an ExperimentConfig."""
    if isinstance(config_data, ExperimentConfig):
        config = config_data
    else:
        config = ExperimentConfig.from_json(config_data)

    tasks = []
    for job in _instance_jobs(config):
        ident, inst = _build_instance(job, config.seed)
        for solver in config.solvers:
            tasks.append((ident, inst, job["family"], solver, config))

    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_compute_row, tasks))
    else:
        rows = [_compute_row(t) for t in tasks]

    out = Path(outdir) if outdir is not None else None
    for i, row in enumerate(rows):
        trace_blob = row.pop("_trace")
        row["trace_path"] = ""
        if config.trace and out is not None:
            tdir = out / "traces"
            tdir.mkdir(parents=True, exist_ok=True)
            rel = f"traces/row{i:04d}_{row['instance_id']}_{row['solver']}.json"
            with open(out / rel, "w") as fh:
                json.dump(trace_blob, fh, indent=2, sort_keys=True, default=str)
                fh.write("\n")
            row["trace_path"] = rel

    report = ExperimentReport(rows=rows)
    if out is not None:
        report.write(out)
    return report


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return ExperimentConfig.from_json(data)
