"""Experiment harness: initialization histograms, reorder comparisons and
validation sweeps.

The histogram procedure measures how much the initial activities matter
for a problem: solve once with the all-zero baseline (conflict count k0),
then many times with per-variable uniform random activities, and bin each
run's conflict count as a rounded percentage of k0.  Every sample's
activity vector is drawn from its own stored seed, so the best and worst
runs can be replayed in isolation.

All reports embed the master seed and a hash of the solver configuration;
CSV artifacts start with the comment line
`# config-hash=<hex> master-seed=<int>` and are byte-stable across reruns
except for wall-time columns.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .cnf import Cnf, compute_var_stats, preprocess_bcp, random_3sat, reorder
from .lang import InitProgram, compute_activities, normalize, print_program
from .rng import SplitMix64, spawn_seeds
from .solver import SolveOutcome, SolverConfig, solve, solve_with_baseline

# Generator coordinates of the bundled desk-scale instance used by the
# test suite and the documentation examples (unsatisfiable, baseline of
# 60 conflicts at the default solver configuration).
BUNDLED_3SAT = {"num_vars": 50, "num_clauses": 215, "seed": 7}


def bundled_cnf() -> Cnf:
    """The bundled random 3-SAT instance (deterministic, never changes)."""
    return random_3sat(**BUNDLED_3SAT)


def config_hash(config: SolverConfig) -> str:
    """Stable 16-hex-digit digest of a solver configuration."""
    blob = json.dumps(asdict(config), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def round_half_away(x: float) -> int:
    """Round to nearest integer, halves away from zero."""
    if x >= 0:
        return int(math.floor(x + 0.5))
    return -int(math.floor(-x + 0.5))


@dataclass
class BaselineRecord:
    problem: str
    conflicts: int  # k0
    decisions: int
    wall_time: float
    config_hash: str


@dataclass
class SampleRow:
    sample_id: int
    seed: int
    conflicts: int
    decisions: int
    percent: int


@dataclass
class HistogramReport:
    problem: str
    samples: int
    lo: float
    hi: float
    master_seed: int
    baseline: BaselineRecord
    bins: dict[int, int]
    rows: list[SampleRow]
    min_conflicts: int
    min_seed: int
    max_conflicts: int
    max_seed: int


def random_init(num_vars: int, seed: int, lo: float, hi: float) -> list[float]:
    """Per-variable uniform activities in [lo, hi) from one sample seed."""
    gen = SplitMix64(seed)
    return [gen.uniform(lo, hi) for _ in range(num_vars)]


def replay_sample(
    cnf: Cnf, seed: int, lo: float, hi: float, config: SolverConfig
) -> SolveOutcome:
    """Re-run one histogram sample from its stored seed."""
    return solve(cnf, random_init(cnf.num_vars, seed, lo, hi), config)


def _histogram_worker(args) -> tuple[int, int, int]:
    cnf, seed, lo, hi, config = args
    outcome = solve(cnf, random_init(cnf.num_vars, seed, lo, hi), config)
    return seed, outcome.conflicts, outcome.decisions


def run_histogram(
    cnf: Cnf,
    samples: int,
    lo: float,
    hi: float,
    config: SolverConfig,
    master_seed: int,
    problem: str = "",
    jobs: int = 1,
) -> HistogramReport:
    """Random-initialization histogram for one preprocessed problem.

    Sample i draws its activities from child seed i of master_seed (see
    rng.spawn_seeds), so any sample can be replayed later.  Raises
    ValueError when the baseline solves without conflicts, because
    percentages of zero are undefined.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not lo < hi and not (lo == hi == 0.0):
        raise ValueError("need lo < hi (or the degenerate all-zero range 0:0)")

    base_out = solve_with_baseline(cnf, config)
    if base_out.conflicts == 0:
        raise ValueError("baseline has no conflicts; histogram undefined")
    baseline = BaselineRecord(
        problem=problem,
        conflicts=base_out.conflicts,
        decisions=base_out.decisions,
        wall_time=base_out.wall_time,
        config_hash=config_hash(config),
    )

    seeds = spawn_seeds(master_seed, samples)
    tasks = [(cnf, seed, lo, hi, config) for seed in seeds]
    if jobs <= 1 or samples < 2:
        results = [_histogram_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_histogram_worker, tasks))

    bins: dict[int, int] = {}
    rows: list[SampleRow] = []
    for i, (seed, conflicts, decisions) in enumerate(results):
        percent = round_half_away(100.0 * conflicts / baseline.conflicts)
        bins[percent] = bins.get(percent, 0) + 1
        rows.append(SampleRow(i, seed, conflicts, decisions, percent))

    best = min(rows, key=lambda r: r.conflicts)
    worst = max(rows, key=lambda r: r.conflicts)
    return HistogramReport(
        problem=problem,
        samples=samples,
        lo=lo,
        hi=hi,
        master_seed=master_seed,
        baseline=baseline,
        bins=bins,
        rows=rows,
        min_conflicts=best.conflicts,
        min_seed=best.seed,
        max_conflicts=worst.conflicts,
        max_seed=worst.seed,
    )


@dataclass
class ReorderComparison:
    original: HistogramReport
    reordered: HistogramReport
    kappa_ratio: float  # reordered k0 / original k0


def compare_reordered(
    cnf: Cnf,
    reorder_seed: int,
    samples: int,
    config: SolverConfig,
    master_seed: int,
    problem: str = "",
    lo: float = 0.0,
    hi: float = 1.0,
    jobs: int = 1,
) -> ReorderComparison:
    """Histogram the original and a reordered twin of the same raw CNF.

    Takes the unpreprocessed formula; both variants are preprocessed here
    so the comparison mirrors the solve pipeline.
    """
    reordered_cnf, _ = reorder(cnf, reorder_seed)
    pre_orig, verdict_o, _ = preprocess_bcp(cnf)
    pre_reord, verdict_r, _ = preprocess_bcp(reordered_cnf)
    if verdict_o != "reduced" or verdict_r != "reduced":
        raise ValueError("problem is decided by preprocessing; nothing to compare")
    original = run_histogram(
        pre_orig, samples, lo, hi, config, master_seed, problem=problem, jobs=jobs
    )
    reordered = run_histogram(
        pre_reord,
        samples,
        lo,
        hi,
        config,
        master_seed,
        problem=f"{problem}.reordered" if problem else "reordered",
        jobs=jobs,
    )
    ratio = reordered.baseline.conflicts / original.baseline.conflicts
    return ReorderComparison(original=original, reordered=reordered, kappa_ratio=ratio)


@dataclass
class ValidationRow:
    problem: str
    baseline_conflicts: int
    program_conflicts: int
    percent: float
    baseline_decisions: int
    program_decisions: int
    baseline_time: float
    program_time: float


@dataclass
class ValidationReport:
    program_text: str
    config_hash: str
    rows: list[ValidationRow]
    mean_percent: float = field(init=False)
    total_percent: float = field(init=False)

    def __post_init__(self):
        if self.rows:
            self.mean_percent = sum(r.percent for r in self.rows) / len(self.rows)
            base_total = sum(r.baseline_conflicts for r in self.rows)
            prog_total = sum(r.program_conflicts for r in self.rows)
            self.total_percent = (
                100.0 * prog_total / base_total if base_total else 100.0
            )
        else:
            self.mean_percent = 100.0
            self.total_percent = 100.0


def run_validation(
    program: InitProgram,
    problems,
    config: SolverConfig,
    normalize_init: bool = True,
) -> ValidationReport:
    """Measure a program against the zero baseline on held-out problems.

    `problems` is an iterable of (name, raw Cnf).  Each problem is
    preprocessed, solved with the zero initialization and with the
    program's (by default normalized) initialization.  Problems decided by
    preprocessing contribute a 100% row, since no search happens either
    way.  This is a measurement tool; it never passes or fails.
    """
    rows = []
    for name, cnf in problems:
        reduced, verdict, _ = preprocess_bcp(cnf)
        if verdict != "reduced":
            rows.append(
                ValidationRow(name, 0, 0, 100.0, 0, 0, 0.0, 0.0)
            )
            continue
        base = solve_with_baseline(reduced, config)
        stats = compute_var_stats(reduced)
        acts = compute_activities(program, reduced, stats)
        if normalize_init:
            acts = normalize(acts)
        prog_out = solve(reduced, acts, config)
        percent = (
            100.0 * prog_out.conflicts / base.conflicts
            if base.conflicts
            else 100.0
        )
        rows.append(
            ValidationRow(
                problem=name,
                baseline_conflicts=base.conflicts,
                program_conflicts=prog_out.conflicts,
                percent=percent,
                baseline_decisions=base.decisions,
                program_decisions=prog_out.decisions,
                baseline_time=base.wall_time,
                program_time=prog_out.wall_time,
            )
        )
    return ValidationReport(
        program_text=print_program(program),
        config_hash=config_hash(config),
        rows=rows,
    )


# ---------------------------------------------------------------------------
# CSV artifacts


def _csv_header_comment(cfg_hash: str, master_seed: int) -> str:
    return f"# config-hash={cfg_hash} master-seed={master_seed}"


def histogram_csv(report: HistogramReport) -> str:
    """percent,count rows sorted by percent."""
    buf = io.StringIO()
    buf.write(_csv_header_comment(report.baseline.config_hash, report.master_seed) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["percent", "count"])
    for percent in sorted(report.bins):
        writer.writerow([percent, report.bins[percent]])
    return buf.getvalue()


def samples_csv(report: HistogramReport) -> str:
    buf = io.StringIO()
    buf.write(_csv_header_comment(report.baseline.config_hash, report.master_seed) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample_id", "seed", "conflicts", "decisions", "percent"])
    for row in report.rows:
        writer.writerow([row.sample_id, row.seed, row.conflicts, row.decisions, row.percent])
    return buf.getvalue()


def validation_csv(report: ValidationReport, master_seed: int) -> str:
    buf = io.StringIO()
    buf.write(_csv_header_comment(report.config_hash, master_seed) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "problem",
            "baseline_conflicts",
            "program_conflicts",
            "percent",
            "baseline_decisions",
            "program_decisions",
            "baseline_time",
            "program_time",
        ]
    )
    for r in report.rows:
        writer.writerow(
            [
                r.problem,
                r.baseline_conflicts,
                r.program_conflicts,
                f"{r.percent:.3f}",
                r.baseline_decisions,
                r.program_decisions,
                f"{r.baseline_time:.6f}",
                f"{r.program_time:.6f}",
            ]
        )
    return buf.getvalue()
