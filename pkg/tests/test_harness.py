import pytest

from satgp.cnf import Cnf, IDENTITY_SEED, preprocess_bcp, random_3sat
from satgp.harness import (
    bundled_cnf,
    compare_reordered,
    config_hash,
    histogram_csv,
    random_init,
    replay_sample,
    round_half_away,
    run_histogram,
    run_validation,
    samples_csv,
    validation_csv,
)
from satgp.lang import parse_program, preset_program
from satgp.rng import spawn_seeds
from satgp.solver import SolverConfig


CONFIG = SolverConfig(rng_seed=3)


def reduced_bundled():
    reduced, verdict, _ = preprocess_bcp(bundled_cnf())
    assert verdict == "reduced"
    return reduced


class TestRounding:
    @pytest.mark.parametrize(
        "value,expected",
        [(0.4, 0), (0.5, 1), (1.5, 2), (2.5, 3), (99.5, 100), (-0.5, -1), (-1.5, -2)],
    )
    def test_half_away_from_zero(self, value, expected):
        assert round_half_away(value) == expected


class TestHistogram:
    def test_zero_range_single_bin_at_100(self):
        report = run_histogram(reduced_bundled(), 1, 0.0, 0.0, CONFIG, master_seed=5)
        assert report.bins == {100: 1}

    def test_counts_sum_and_extremes(self):
        report = run_histogram(
            reduced_bundled(), 30, 0.0, 1.0, CONFIG, master_seed=6, problem="bundled"
        )
        assert sum(report.bins.values()) == 30
        k0 = report.baseline.conflicts
        percents = [100.0 * r.conflicts / k0 for r in report.rows]
        assert min(percents) <= 100.0 * report.min_conflicts / k0 + 1e-9
        assert max(percents) >= 100.0 * report.max_conflicts / k0 - 1e-9
        assert len(report.bins) >= 2

    def test_replay_best_and_worst(self):
        cnf = reduced_bundled()
        report = run_histogram(cnf, 20, 0.0, 1.0, CONFIG, master_seed=7)
        best = replay_sample(cnf, report.min_seed, 0.0, 1.0, CONFIG)
        worst = replay_sample(cnf, report.max_seed, 0.0, 1.0, CONFIG)
        assert best.conflicts == report.min_conflicts
        assert worst.conflicts == report.max_conflicts

    def test_deterministic_bins(self):
        cnf = reduced_bundled()
        a = run_histogram(cnf, 15, 0.0, 1.0, CONFIG, master_seed=8)
        b = run_histogram(cnf, 15, 0.0, 1.0, CONFIG, master_seed=8)
        assert a.bins == b.bins
        assert [r.conflicts for r in a.rows] == [r.conflicts for r in b.rows]

    def test_seed_derivation_is_documented_stream(self):
        cnf = reduced_bundled()
        report = run_histogram(cnf, 5, 0.0, 1.0, CONFIG, master_seed=42)
        assert [r.seed for r in report.rows] == spawn_seeds(42, 5)

    def test_baseline_without_conflicts_raises(self):
        trivial = Cnf.from_lists(2, [[1, 2]])
        with pytest.raises(ValueError, match="baseline has no conflicts"):
            run_histogram(trivial, 5, 0.0, 1.0, CONFIG, master_seed=1)

    def test_parallel_matches_sequential(self):
        cnf = reduced_bundled()
        seq = run_histogram(cnf, 10, 0.0, 1.0, CONFIG, master_seed=9, jobs=1)
        par = run_histogram(cnf, 10, 0.0, 1.0, CONFIG, master_seed=9, jobs=2)
        assert seq.bins == par.bins
        assert [r.conflicts for r in seq.rows] == [r.conflicts for r in par.rows]


class TestCompareReordered:
    def test_identity_seed_same_baseline(self):
        comparison = compare_reordered(
            bundled_cnf(), IDENTITY_SEED, 5, CONFIG, master_seed=11
        )
        assert comparison.kappa_ratio == 1.0
        assert (
            comparison.original.baseline.conflicts
            == comparison.reordered.baseline.conflicts
        )

    def test_verdicts_agree(self):
        # bundled instance is unsatisfiable; reordering must preserve that.
        cnf = bundled_cnf()
        for seed in (1, 2, 3):
            comparison = compare_reordered(cnf, seed, 3, CONFIG, master_seed=12)
            assert comparison.original.baseline.conflicts > 0
            assert comparison.reordered.baseline.conflicts > 0

    def test_trivial_problem_rejected(self):
        trivial = Cnf.from_lists(3, [[1], [2], [3]])
        with pytest.raises(ValueError, match="preprocessing"):
            compare_reordered(trivial, 1, 3, CONFIG, master_seed=13)


class TestValidation:
    def test_zero_program_is_100_percent(self):
        problems = [
            ("a", random_3sat(15, 63, seed=41)),
            ("b", random_3sat(15, 63, seed=42)),
        ]
        report = run_validation(preset_program("zero"), problems, CONFIG)
        assert all(row.percent == 100.0 for row in report.rows)
        assert report.mean_percent == 100.0
        assert report.total_percent == 100.0

    def test_add_lc_produces_full_report(self):
        problems = [(f"p{i}", random_3sat(14, 60, seed=50 + i)) for i in range(10)]
        report = run_validation(preset_program("add_lc"), problems, CONFIG)
        assert len(report.rows) == 10
        for row in report.rows:
            assert row.baseline_conflicts >= 0
            assert row.program_conflicts >= 0
            assert row.percent >= 0.0
            assert row.baseline_time >= 0.0

    def test_specialist_matches_direct_evaluation(self):
        from satgp.gp import FitnessCaseSet, Individual, evaluate

        cnf = bundled_cnf()
        program = parse_program("IN: sub(xp)")
        report = run_validation(program, [("bundled", cnf)], CONFIG)
        cases = FitnessCaseSet.from_cnfs(
            [("bundled", cnf)], CONFIG, normalize_init=True
        )
        ind = evaluate(Individual(program), cases)
        assert report.rows[0].program_conflicts == ind.per_case[0][0]
        assert report.rows[0].program_decisions == ind.per_case[0][1]

    def test_trivial_problem_contributes_100(self):
        trivial = Cnf.from_lists(2, [[1], [2]])
        report = run_validation(preset_program("add_lc"), [("t", trivial)], CONFIG)
        assert report.rows[0].percent == 100.0


class TestCsvArtifacts:
    def test_histogram_csv_shape(self):
        report = run_histogram(
            reduced_bundled(), 12, 0.0, 1.0, CONFIG, master_seed=21, problem="x"
        )
        text = histogram_csv(report)
        lines = text.strip().splitlines()
        assert lines[0].startswith("# config-hash=")
        assert f"master-seed=21" in lines[0]
        assert lines[1] == "percent,count"
        counts = [int(line.split(",")[1]) for line in lines[2:]]
        assert sum(counts) == 12

    def test_samples_csv_replayable(self):
        cnf = reduced_bundled()
        report = run_histogram(cnf, 6, 0.0, 1.0, CONFIG, master_seed=22)
        lines = samples_csv(report).strip().splitlines()
        assert lines[1] == "sample_id,seed,conflicts,decisions,percent"
        first = lines[2].split(",")
        outcome = replay_sample(cnf, int(first[1]), 0.0, 1.0, CONFIG)
        assert outcome.conflicts == int(first[2])

    def test_validation_csv_columns(self):
        report = run_validation(
            preset_program("zero"), [("q", random_3sat(12, 50, seed=60))], CONFIG
        )
        lines = validation_csv(report, master_seed=0).strip().splitlines()
        assert lines[1].split(",") == [
            "problem",
            "baseline_conflicts",
            "program_conflicts",
            "percent",
            "baseline_decisions",
            "program_decisions",
            "baseline_time",
            "program_time",
        ]

    def test_csv_determinism_excluding_time(self):
        cnf = reduced_bundled()
        a = run_histogram(cnf, 8, 0.0, 1.0, CONFIG, master_seed=23)
        b = run_histogram(cnf, 8, 0.0, 1.0, CONFIG, master_seed=23)
        assert histogram_csv(a) == histogram_csv(b)
        assert samples_csv(a) == samples_csv(b)


class TestRandomInit:
    def test_range_and_determinism(self):
        a = random_init(50, 99, 0.25, 0.75)
        b = random_init(50, 99, 0.25, 0.75)
        assert a == b
        assert all(0.25 <= x < 0.75 for x in a)

    def test_config_hash_stability(self):
        assert config_hash(SolverConfig()) == config_hash(SolverConfig())
        assert config_hash(SolverConfig()) != config_hash(SolverConfig(rng_seed=1))
