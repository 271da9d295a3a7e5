"""Steady-state genetic programming over initialization programs.

Individuals are three-tree programs (PRE / IN / POST).  Fitness is

    F = sqrt(sum_i (c_i + d_i/1000)^2) + nodes/1000

over the fitness cases, where c_i / d_i are the solver's conflict and
decision counts; lower is better.  Squaring makes balanced improvements
across cases beat lopsided ones, decisions and tree size act as
tie-breakers.

One generation performs population_size replacement events.  Each event
tournament-selects two parents (size 10, lowest fitness wins) and creates
one child by subtree crossover within a uniformly chosen fragment (95%),
by fresh ramped-half-and-half creation (2%), or by copying a parent.
Children deeper than the crossover limit are rejected and the parent is
copied instead.  The child replaces the loser of an inverse tournament,
with the population's current best individual protected from replacement.
Copies reuse the parent's solver statistics, which is exact because
evaluation is deterministic.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .cnf import Cnf, VarStats, compute_var_stats, preprocess_bcp
from .lang import (
    FUNCTIONS,
    TERMINALS_BY_FRAGMENT,
    InitProgram,
    Node,
    compute_activities,
    node_count,
    normalize,
    parse_program,
    print_program,
    replace_subtree,
    subtree_at,
    tree_depth,
    validate_program,
)
from .rng import SplitMix64
from .solver import SolverConfig, solve

_FUNCTION_NAMES = tuple(FUNCTIONS)


@dataclass
class GpConfig:
    population_size: int = 1000
    generations: int = 5
    crossover_prob: float = 0.95
    creation_prob: float = 0.02
    mutation_prob: float = 0.0
    creation_max_depth: int = 6
    crossover_max_depth: int = 17
    tournament_size: int = 10
    rng_seed: int = 0

    def validate(self) -> None:
        for name in ("crossover_prob", "creation_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.crossover_prob + self.creation_prob > 1.0:
            raise ValueError("crossover_prob + creation_prob must not exceed 1")
        if self.creation_max_depth < 2:
            raise ValueError("creation_max_depth must be >= 2 (ramp starts at 2)")
        if self.crossover_max_depth < self.creation_max_depth:
            raise ValueError("crossover_max_depth must be >= creation_max_depth")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must be in [1, population_size]")


@dataclass
class Individual:
    program: InitProgram
    fitness: float | None = None
    per_case: list[tuple[int, int]] | None = None  # (conflicts, decisions)
    node_count: int = 0
    origin: str = ""  # e.g. "full-4", "grow-2", "crossover", "copy"

    def __post_init__(self):
        if not self.node_count:
            self.node_count = self.program.node_count


@dataclass
class FitnessCase:
    name: str
    cnf: Cnf  # preprocessed
    stats: VarStats


@dataclass
class FitnessCaseSet:
    cases: list[FitnessCase]
    solver_config: SolverConfig
    normalize_init: bool = False

    @staticmethod
    def from_cnfs(named_cnfs, solver_config: SolverConfig,
                  normalize_init: bool = False) -> "FitnessCaseSet":
        """Preprocess raw CNFs into fitness cases.

        Rejects problems that preprocessing alone satisfies or refutes: a
        fitness case must require search.
        """
        cases = []
        for name, cnf in named_cnfs:
            reduced, verdict, _ = preprocess_bcp(cnf)
            if verdict != "reduced":
                raise ValueError(
                    f"fitness case {name!r} is {verdict} after preprocessing;"
                    " a fitness case must require search"
                )
            cases.append(FitnessCase(name, reduced, compute_var_stats(reduced)))
        if not cases:
            raise ValueError("at least one fitness case is required")
        return FitnessCaseSet(cases, solver_config, normalize_init)


def fitness(per_case, node_count: int) -> float:
    """Combine per-case (conflicts, decisions) and tree size into one score."""
    total = 0.0
    for conflicts, decisions in per_case:
        term = conflicts + decisions / 1000.0
        total += term * term
    return math.sqrt(total) + node_count / 1000.0


def evaluate(
    ind: Individual, cases: FitnessCaseSet, normalize_init: bool | None = None
) -> Individual:
    """Solve every fitness case with the individual's initialization.

    normalize_init overrides the case set's default when given.  (With
    this solver, normalizing cannot change the search trace; the flag
    only controls which vector is handed over.)
    """
    if normalize_init is None:
        normalize_init = cases.normalize_init
    per_case = []
    for case in cases.cases:
        acts = compute_activities(ind.program, case.cnf, case.stats)
        if normalize_init:
            acts = normalize(acts)
        outcome = solve(case.cnf, acts, cases.solver_config)
        per_case.append((outcome.conflicts, outcome.decisions))
    ind.per_case = per_case
    ind.node_count = ind.program.node_count
    ind.fitness = fitness(per_case, ind.node_count)
    return ind


def _evaluate_text(args) -> tuple[float, list[tuple[int, int]]]:
    """Process-pool worker: evaluate a program given as text."""
    text, cases = args
    ind = evaluate(Individual(parse_program(text)), cases)
    return ind.fitness, ind.per_case


def evaluate_population(population, cases: FitnessCaseSet, jobs: int = 1) -> None:
    """Evaluate all unevaluated individuals, optionally in parallel.

    Results are committed in population order, so the outcome is identical
    to sequential evaluation regardless of worker count.
    """
    todo = [ind for ind in population if ind.fitness is None]
    if jobs <= 1 or len(todo) < 2:
        for ind in todo:
            evaluate(ind, cases)
        return
    payload = [(print_program(ind.program), cases) for ind in todo]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for ind, (fit, per_case) in zip(todo, pool.map(_evaluate_text, payload)):
            ind.fitness = fit
            ind.per_case = per_case
            ind.node_count = ind.program.node_count


# ---------------------------------------------------------------------------
# Tree creation


def random_tree(rng: SplitMix64, fragment: str, depth: int, method: str) -> Node:
    """Create one random tree.

    'full' places functions everywhere above the target depth so every
    leaf sits exactly at `depth`; 'grow' draws uniformly from terminals
    and functions, so leaves may appear early.
    """
    terminals = TERMINALS_BY_FRAGMENT[fragment]
    if depth <= 1:
        return Node(terminals[rng.randrange(len(terminals))])
    if method == "full":
        kind = _FUNCTION_NAMES[rng.randrange(len(_FUNCTION_NAMES))]
    else:
        pool_size = len(terminals) + len(_FUNCTION_NAMES)
        pick = rng.randrange(pool_size)
        if pick < len(terminals):
            return Node(terminals[pick])
        kind = _FUNCTION_NAMES[pick - len(terminals)]
    children = tuple(
        random_tree(rng, fragment, depth - 1, method) for _ in range(FUNCTIONS[kind])
    )
    return Node(kind, children)


def random_individual(rng: SplitMix64, depth: int, method: str) -> Individual:
    prog = InitProgram(
        pre=random_tree(rng, "pre", depth, method),
        in_loop=random_tree(rng, "in", depth, method),
        post=random_tree(rng, "post", depth, method),
    )
    return Individual(prog, origin=f"{method}-{depth}")


def create_initial_population(config: GpConfig, rng: SplitMix64 | None = None):
    """Ramped half-and-half: cycle depths 2..creation_max_depth, half of
    the individuals at each depth built with 'full', half with 'grow'."""
    config.validate()
    if rng is None:
        rng = SplitMix64(config.rng_seed)
    ramp = [
        (depth, method)
        for depth in range(2, config.creation_max_depth + 1)
        for method in ("full", "grow")
    ]
    population = []
    for i in range(config.population_size):
        depth, method = ramp[i % len(ramp)]
        population.append(random_individual(rng, depth, method))
    return population


# ---------------------------------------------------------------------------
# Variation operators


def crossover(
    parent_a: InitProgram,
    parent_b: InitProgram,
    rng: SplitMix64,
    max_depth: int,
) -> InitProgram | None:
    """Subtree crossover within one uniformly chosen fragment.

    Fragments are exchanged like-for-like (PRE with PRE and so on), which
    keeps loop-only terminals inside IN.  Returns None when the child
    would exceed max_depth.
    """
    fragment = ("pre", "in_loop", "post")[rng.randrange(3)]
    tree_a = getattr(parent_a, fragment)
    tree_b = getattr(parent_b, fragment)
    point_a = rng.randrange(node_count(tree_a))
    point_b = rng.randrange(node_count(tree_b))
    donor = subtree_at(tree_b, point_b)
    new_tree = replace_subtree(tree_a, point_a, donor)
    if tree_depth(new_tree) > max_depth:
        return None
    return replace(parent_a, **{fragment: new_tree})


def mutate(prog: InitProgram, rng: SplitMix64, config: GpConfig) -> InitProgram:
    """Subtree replacement with a fresh grow tree (off by default)."""
    fragment = ("pre", "in_loop", "post")[rng.randrange(3)]
    lang_fragment = {"pre": "pre", "in_loop": "in", "post": "post"}[fragment]
    tree = getattr(prog, fragment)
    point = rng.randrange(node_count(tree))
    depth = 2 + rng.randrange(config.creation_max_depth - 1)
    donor = random_tree(rng, lang_fragment, depth, "grow")
    new_tree = replace_subtree(tree, point, donor)
    if tree_depth(new_tree) > config.crossover_max_depth:
        return prog
    return replace(prog, **{fragment: new_tree})


def _sample_indices(rng: SplitMix64, n: int, k: int) -> list[int]:
    """k distinct indices from range(n), in draw order."""
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < k:
        i = rng.randrange(n)
        if i not in seen:
            seen.add(i)
            out.append(i)
    return out


def tournament_select(population, rng: SplitMix64, size: int) -> Individual:
    """Best (lowest fitness) of `size` distinct uniform draws.

    Sampling without replacement makes a full-population tournament
    return the global best.
    """
    best = None
    for i in _sample_indices(rng, len(population), size):
        if best is None or population[i].fitness < best.fitness:
            best = population[i]
    return best


def _best_index(population) -> int:
    best = 0
    for i in range(1, len(population)):
        if population[i].fitness < population[best].fitness:
            best = i
    return best


def _victim_index(population, rng: SplitMix64, size: int, protected: int) -> int:
    """Inverse tournament: the sampled individual with the highest fitness,
    never the protected (best-so-far) slot."""
    candidates = [
        c for c in _sample_indices(rng, len(population), size) if c != protected
    ]
    while not candidates:  # only possible when size == 1 hit the best slot
        candidates = [
            c for c in _sample_indices(rng, len(population), size) if c != protected
        ]
    victim = candidates[0]
    for c in candidates[1:]:
        if population[c].fitness > population[victim].fitness:
            victim = c
    return victim


def step_steady_state(
    population,
    cases: FitnessCaseSet,
    config: GpConfig,
    rng: SplitMix64,
    on_child=None,
):
    """Run population_size replacement events in place; returns population.

    on_child, when given, is called with every freshly created Individual
    after evaluation (used by tests to audit depth and terminal rules).
    """
    for _ in range(config.population_size):
        parent_a = tournament_select(population, rng, config.tournament_size)
        parent_b = tournament_select(population, rng, config.tournament_size)

        u = rng.random()
        if u < config.crossover_prob:
            child_prog = crossover(
                parent_a.program, parent_b.program, rng, config.crossover_max_depth
            )
            if child_prog is None:
                child = Individual(
                    parent_a.program,
                    fitness=parent_a.fitness,
                    per_case=parent_a.per_case,
                    origin="copy",
                )
            else:
                child = Individual(child_prog, origin="crossover")
        elif u < config.crossover_prob + config.creation_prob:
            depth = 2 + rng.randrange(config.creation_max_depth - 1)
            method = "full" if rng.flip() else "grow"
            child = random_individual(rng, depth, method)
        else:
            child = Individual(
                parent_a.program,
                fitness=parent_a.fitness,
                per_case=parent_a.per_case,
                origin="copy",
            )

        if rng.random() < config.mutation_prob:
            child = Individual(mutate(child.program, rng, config), origin="mutation")

        validate_program(child.program)  # fragment closure is an invariant
        if child.fitness is None:
            evaluate(child, cases)
        if on_child is not None:
            on_child(child)

        best = _best_index(population)
        victim = _victim_index(population, rng, config.tournament_size, best)
        population[victim] = child
    return population


@dataclass
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_nodes: int
    best_program: str


def _record(generation: int, population) -> GenerationRecord:
    best = population[_best_index(population)]
    mean = sum(ind.fitness for ind in population) / len(population)
    return GenerationRecord(
        generation=generation,
        best_fitness=best.fitness,
        mean_fitness=mean,
        best_nodes=best.node_count,
        best_program=print_program(best.program),
    )


def run_evolution(
    cases: FitnessCaseSet,
    config: GpConfig,
    on_child=None,
    jobs: int = 1,
    population=None,
    start_generation: int = 0,
    rng: SplitMix64 | None = None,
    state_out: dict | None = None,
):
    """Create, evaluate and evolve a population.

    Returns (best individual, list of GenerationRecord).  Record 0
    describes the evaluated random population; generations=0 therefore
    returns the best purely random individual.  population /
    start_generation / rng allow resuming from a checkpoint; a resumed run
    continues the exact random stream of an uninterrupted one.  When given,
    state_out receives the final 'population', 'rng' and 'generation' for
    checkpointing.
    """
    config.validate()
    if rng is None:
        rng = SplitMix64(config.rng_seed)
    if population is None:
        population = create_initial_population(config, rng)
    evaluate_population(population, cases, jobs=jobs)

    log = [_record(start_generation, population)]
    gen = start_generation
    for gen in range(start_generation + 1, config.generations + 1):
        step_steady_state(population, cases, config, rng, on_child=on_child)
        log.append(_record(gen, population))
    best = population[_best_index(population)]
    if state_out is not None:
        state_out["population"] = population
        state_out["rng"] = rng
        state_out["generation"] = max(gen, start_generation)
    return best, log


# ---------------------------------------------------------------------------
# Checkpoints


def save_checkpoint(population, generation: int, rng: SplitMix64) -> str:
    """Serialize a population so an evolution run can be resumed.

    One line per individual: fitness TAB program text.  The header keeps
    the generation number and the RNG state, so a resumed run continues
    the exact random stream of an uninterrupted one.
    """
    lines = [f"# generation={generation} rng_state={rng.state}"]
    for ind in population:
        lines.append(f"{ind.fitness!r}\t{print_program(ind.program)}")
    return "\n".join(lines) + "\n"


def load_checkpoint(text: str):
    """Inverse of save_checkpoint; returns (population, generation, rng)."""
    lines = text.splitlines()
    header = lines[0]
    if not header.startswith("# generation="):
        raise ValueError("not a population checkpoint")
    fields = dict(part.split("=") for part in header[2:].split())
    generation = int(fields["generation"])
    rng = SplitMix64(0)
    rng.state = int(fields["rng_state"])
    population = []
    for line in lines[1:]:
        if not line.strip():
            continue
        fit_text, prog_text = line.split("\t", 1)
        ind = Individual(parse_program(prog_text))
        ind.fitness = float(fit_text)
        population.append(ind)
    return population, generation, rng
