import pytest
from hypothesis import given, settings, strategies as st

from satgp.cnf import random_3sat
from satgp.gp import (
    FitnessCaseSet,
    GpConfig,
    Individual,
    create_initial_population,
    crossover,
    evaluate,
    evaluate_population,
    fitness,
    load_checkpoint,
    run_evolution,
    save_checkpoint,
    step_steady_state,
    tournament_select,
)
from satgp.lang import (
    TERMINALS_BY_FRAGMENT,
    iter_nodes,
    parse_program,
    print_program,
    tree_depth,
    validate_program,
)
from satgp.rng import SplitMix64
from satgp.solver import SolverConfig, solve_with_baseline


def small_cases(normalize_init=False) -> FitnessCaseSet:
    cnf = random_3sat(20, 85, seed=77)
    return FitnessCaseSet.from_cnfs(
        [("case0", cnf)], SolverConfig(rng_seed=1), normalize_init
    )


def small_config(**overrides) -> GpConfig:
    base = dict(
        population_size=16,
        generations=2,
        tournament_size=4,
        rng_seed=9,
    )
    base.update(overrides)
    return GpConfig(**base)


class TestFitness:
    def test_golden_value(self):
        assert abs(fitness([(464, 9231)], 11) - 473.242) < 1e-9

    def test_zero_case(self):
        assert fitness([(0, 0)], 0) == 0.0

    def test_three_four_five(self):
        assert fitness([(3, 0), (4, 0)], 0) == pytest.approx(5.0, abs=1e-12)

    def test_balanced_beats_lopsided(self):
        balanced = fitness([(10, 0), (10, 0)], 0)
        lopsided = fitness([(1, 0), (19, 0)], 0)
        assert balanced < lopsided

    @settings(max_examples=80, deadline=None)
    @given(
        conflicts=st.integers(0, 10**6),
        decisions=st.integers(0, 10**6),
        nodes=st.integers(0, 10**4),
    )
    def test_strictly_monotone(self, conflicts, decisions, nodes):
        base = fitness([(conflicts, decisions)], nodes)
        assert fitness([(conflicts + 1, decisions)], nodes) > base
        assert fitness([(conflicts, decisions + 1)], nodes) > base
        assert fitness([(conflicts, decisions)], nodes + 1) > base


def is_full_shape(tree, target_depth):
    """Every leaf at exactly target_depth."""
    def leaf_depths(node, depth):
        if not node.children:
            yield depth
        for child in node.children:
            yield from leaf_depths(child, depth + 1)
    return set(leaf_depths(tree, 1)) == {target_depth}


class TestCreation:
    def test_depth_bounds(self):
        config = small_config(population_size=200, creation_max_depth=6)
        for ind in create_initial_population(config):
            for _, tree in ind.program.fragments():
                assert tree_depth(tree) <= 6

    def test_deterministic(self):
        config = small_config(population_size=50)
        a = create_initial_population(config)
        b = create_initial_population(config)
        assert [i.program for i in a] == [i.program for i in b]

    def test_fragment_terminal_restrictions(self):
        config = small_config(population_size=300)
        legal_outside = set(TERMINALS_BY_FRAGMENT["pre"])
        for ind in create_initial_population(config):
            validate_program(ind.program)
            for fragment, tree in ind.program.fragments():
                if fragment == "in":
                    continue
                for node in iter_nodes(tree):
                    if not node.children:
                        assert node.kind in legal_outside

    def test_both_shapes_at_each_ramp_depth(self):
        config = GpConfig(population_size=1000, tournament_size=10, rng_seed=4)
        population = create_initial_population(config)
        seen = {}
        for ind in population:
            method, depth = ind.origin.split("-")
            seen.setdefault((method, int(depth)), 0)
            seen[(method, int(depth))] += 1
        for depth in range(2, 7):
            assert seen[("full", depth)] == 100
            assert seen[("grow", depth)] == 100
        # full trees really are full-shaped at their ramp depth
        for ind in population:
            method, depth = ind.origin.split("-")
            if method == "full":
                for _, tree in ind.program.fragments():
                    assert is_full_shape(tree, int(depth))
            else:
                for _, tree in ind.program.fragments():
                    assert tree_depth(tree) <= int(depth)


class TestEvaluate:
    def test_zero_program_matches_baseline(self):
        cases = small_cases()
        baseline = solve_with_baseline(cases.cases[0].cnf, cases.solver_config)
        ind = evaluate(Individual(parse_program("IN: 0")), cases)
        assert ind.per_case == [(baseline.conflicts, baseline.decisions)]

    def test_deterministic(self):
        cases = small_cases()
        prog = parse_program("IN: add(lc)")
        a = evaluate(Individual(prog), cases)
        b = evaluate(Individual(prog), cases)
        assert a.fitness == b.fitness
        assert a.per_case == b.per_case

    def test_normalize_flag_cannot_change_trace(self):
        prog = parse_program("IN: sub(xp)")
        raw = evaluate(Individual(prog), small_cases(normalize_init=False))
        norm = evaluate(Individual(prog), small_cases(normalize_init=True))
        assert raw.per_case == norm.per_case

    def test_rejects_trivial_fitness_case(self):
        from satgp.cnf import Cnf

        with pytest.raises(ValueError, match="require search"):
            FitnessCaseSet.from_cnfs(
                [("triv", Cnf.from_lists(1, [[1]]))], SolverConfig()
            )

    def test_parallel_evaluation_matches_sequential(self):
        cases = small_cases()
        config = small_config(population_size=8)
        seq = create_initial_population(config)
        par = create_initial_population(config)
        evaluate_population(seq, cases, jobs=1)
        evaluate_population(par, cases, jobs=2)
        assert [i.fitness for i in seq] == [i.fitness for i in par]


class TestSelection:
    def test_tournament_full_size_returns_global_best(self):
        cases = small_cases()
        config = small_config(population_size=12)
        population = create_initial_population(config)
        evaluate_population(population, cases)
        best_fit = min(i.fitness for i in population)
        # Sampling is without replacement, so a full-size tournament sees
        # the whole population and must return the global best.
        for seed in range(5):
            winner = tournament_select(population, SplitMix64(seed), len(population))
            assert winner.fitness == best_fit

    def test_tournament_size_one_is_uniform_pick(self):
        cases = small_cases()
        config = small_config(population_size=6)
        population = create_initial_population(config)
        evaluate_population(population, cases)
        rng = SplitMix64(4)
        picks = {id(tournament_select(population, rng, 1)) for _ in range(60)}
        assert len(picks) > 1


class TestCrossover:
    def test_fragment_closure_and_depth(self):
        rng = SplitMix64(8)
        config = small_config(population_size=60)
        population = create_initial_population(config)
        made = 0
        for _ in range(400):
            a = population[rng.randrange(len(population))]
            b = population[rng.randrange(len(population))]
            child = crossover(a.program, b.program, rng, max_depth=17)
            if child is None:
                continue
            made += 1
            validate_program(child)
            for _, tree in child.fragments():
                assert tree_depth(tree) <= 17
        assert made > 300

    def test_rejection_on_depth(self):
        rng = SplitMix64(9)
        deep = parse_program("IN: " + "neg(" * 16 + "1" + ")" * 16)
        assert tree_depth(deep.in_loop) == 17
        rejected = 0
        for _ in range(200):
            child = crossover(deep, deep, rng, max_depth=17)
            if child is None:
                rejected += 1
        assert rejected > 0


class TestSteadyState:
    def test_elitism_and_population_size(self):
        cases = small_cases()
        config = small_config(population_size=14, generations=1)
        rng = SplitMix64(config.rng_seed)
        population = create_initial_population(config, rng)
        evaluate_population(population, cases)
        best_before = min(i.fitness for i in population)
        step_steady_state(population, cases, config, rng)
        assert len(population) == 14
        assert min(i.fitness for i in population) <= best_before

    def test_children_respect_rules(self):
        cases = small_cases()
        config = small_config(population_size=12, generations=1)
        rng = SplitMix64(2)
        population = create_initial_population(config, rng)
        evaluate_population(population, cases)
        children = []
        step_steady_state(population, cases, config, rng, on_child=children.append)
        assert len(children) == 12
        for child in children:
            validate_program(child.program)
            limit = 6 if child.origin.startswith(("full", "grow")) else 17
            for _, tree in child.program.fragments():
                assert tree_depth(tree) <= limit


class TestRunEvolution:
    def test_generations_zero_returns_best_of_random(self):
        cases = small_cases()
        config = small_config(generations=0, population_size=10)
        best, log = run_evolution(cases, config)
        assert len(log) == 1 and log[0].generation == 0
        assert best.fitness == log[0].best_fitness

    def test_deterministic_rerun(self):
        cases = small_cases()
        config = small_config(population_size=10, generations=2)
        best_a, log_a = run_evolution(cases, config)
        best_b, log_b = run_evolution(cases, config)
        assert log_a == log_b
        assert print_program(best_a.program) == print_program(best_b.program)

    def test_best_fitness_non_increasing(self):
        cases = small_cases()
        config = small_config(population_size=12, generations=3)
        _, log = run_evolution(cases, config)
        series = [rec.best_fitness for rec in log]
        assert all(b <= a for a, b in zip(series, series[1:]))

    def test_best_reevaluates_to_same_fitness(self):
        cases = small_cases()
        config = small_config(population_size=10, generations=1)
        best, _ = run_evolution(cases, config)
        fresh = evaluate(Individual(best.program), cases)
        assert fresh.fitness == best.fitness

    def test_resume_matches_uninterrupted(self):
        cases = small_cases()
        full_config = small_config(population_size=10, generations=3)
        _, log_full = run_evolution(cases, full_config)

        partial_state = {}
        part_config = small_config(population_size=10, generations=2)
        _, log_part = run_evolution(cases, part_config, state_out=partial_state)
        checkpoint = save_checkpoint(
            partial_state["population"],
            partial_state["generation"],
            partial_state["rng"],
        )
        population, generation, rng = load_checkpoint(checkpoint)
        _, log_resumed = run_evolution(
            cases,
            full_config,
            population=population,
            start_generation=generation,
            rng=rng,
        )
        assert log_resumed[-1] == log_full[-1]


class TestCheckpoint:
    def test_roundtrip(self):
        cases = small_cases()
        config = small_config(population_size=6, generations=0)
        state = {}
        run_evolution(cases, config, state_out=state)
        text = save_checkpoint(state["population"], 0, state["rng"])
        population, generation, rng = load_checkpoint(text)
        assert generation == 0
        assert rng.state == state["rng"].state
        assert [print_program(i.program) for i in population] == [
            print_program(i.program) for i in state["population"]
        ]
        assert [i.fitness for i in population] == [
            i.fitness for i in state["population"]
        ]
