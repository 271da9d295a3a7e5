"""Conflict-driven clause-learning SAT solver with injectable activities.

The decision heuristic is an activity scheme in the MiniSAT style: each
variable carries a double-precision activity; on every conflict the
variables of the learned clause are bumped by the current increment and
the increment grows by 1/var_decay, so older bumps decay 5% per conflict
at the default setting.  Decisions pick the unassigned variable of
maximum activity (ties broken by the seeded RNG), except that with a
small probability a uniformly random unassigned variable is chosen.
Decision variables are always assigned false first.

The caller supplies the initial activity vector.  It is normalized
internally (divided by its largest magnitude), which makes the search
trace invariant under positive scaling of the initialization: solving
with `acts` and with `normalize(acts)` produces identical statistics,
because normalization is idempotent bit for bit.  Only the ordering and
tie structure of the initial activities can influence the search.

Search machinery: two-watched-literal propagation, first-UIP clause
learning with non-chronological backjumping, geometric restarts that keep
learned clauses and activities, and learned-clause database reduction
driven by clause activities.  There is no timeout; the solver always runs
to completion and the returned model is verified against the input
clauses before it is returned.

Intended for desk-scale experiments: data structures are plain Python and
decisions scan the variable range linearly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .cnf import Cnf
from .lang import normalize
from .rng import SplitMix64

VAR_RESCALE_FACTOR = 1e-100
CLAUSE_RESCALE_LIMIT = 1e20


@dataclass
class SolverConfig:
    """Search parameters; the defaults define this toolkit's baseline."""

    var_decay: float = 0.95
    random_decision_freq: float = 0.02
    rescale_threshold: float = 1e100
    restart_first: int = 100
    restart_factor: float = 1.5
    learnt_db_initial_fraction: float = 1.0 / 3.0
    learnt_db_growth: float = 1.1
    clause_decay: float = 0.999
    rng_seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.var_decay < 1.0:
            raise ValueError("var_decay must be in (0, 1)")
        if not 0.0 <= self.random_decision_freq < 1.0:
            raise ValueError("random_decision_freq must be in [0, 1)")
        if self.restart_first < 1:
            raise ValueError("restart_first must be >= 1")


@dataclass
class SolveOutcome:
    verdict: str  # 'sat' or 'unsat'
    conflicts: int
    decisions: int
    propagations: int  # implied assignments made during search
    model: dict[int, bool] | None  # present iff sat; covers every variable
    wall_time: float  # seconds; the only nondeterministic field


class _Clause:
    __slots__ = ("lits", "learnt", "activity")

    def __init__(self, lits: list[int], learnt: bool = False):
        self.lits = lits
        self.learnt = learnt
        self.activity = 0.0


class _Search:
    def __init__(self, cnf: Cnf, init: list[float], config: SolverConfig):
        self.cnf = cnf
        self.config = config
        n = cnf.num_vars
        self.n = n
        # Internal normalization: only the order of initial activities can
        # matter, never their scale.
        acts = normalize(list(init))
        self.activity = [0.0] + acts
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.assigns: list[bool | None] = [None] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason: list[_Clause | None] = [None] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: dict[int, list[_Clause]] = {}
        self.learnts: list[_Clause] = []
        self.rng = SplitMix64(config.rng_seed)
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0

    # -- assignment plumbing -------------------------------------------------

    def value(self, lit: int) -> bool | None:
        a = self.assigns[abs(lit)]
        if a is None:
            return None
        return a if lit > 0 else not a

    def enqueue(self, lit: int, reason: _Clause | None) -> None:
        v = abs(lit)
        self.assigns[v] = lit > 0
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def cancel_until(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        bound = self.trail_lim[target_level]
        for i in range(len(self.trail) - 1, bound - 1, -1):
            v = abs(self.trail[i])
            self.assigns[v] = None
            self.reason[v] = None
        del self.trail[bound:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    # -- clause plumbing -----------------------------------------------------

    def watch(self, lit: int, clause: _Clause) -> None:
        self.watches.setdefault(lit, []).append(clause)

    def attach(self, clause: _Clause) -> None:
        self.watch(clause.lits[0], clause)
        self.watch(clause.lits[1], clause)

    def detach(self, clause: _Clause) -> None:
        self.watches[clause.lits[0]].remove(clause)
        self.watches[clause.lits[1]].remove(clause)

    def locked(self, clause: _Clause) -> bool:
        return self.reason[abs(clause.lits[0])] is clause

    # -- propagation ---------------------------------------------------------

    def propagate(self) -> _Clause | None:
        """Process the trail queue; return a conflicting clause or None."""
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            watchers = self.watches.get(-p)
            if not watchers:
                continue
            self.watches[-p] = []
            keep = self.watches[-p]
            for idx, clause in enumerate(watchers):
                lits = clause.lits
                if lits[0] == -p:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                if self.value(first) is True:
                    keep.append(clause)
                    continue
                for k in range(2, len(lits)):
                    if self.value(lits[k]) is not False:
                        lits[1], lits[k] = lits[k], lits[1]
                        self.watch(lits[1], clause)
                        break
                else:
                    keep.append(clause)
                    if self.value(first) is False:
                        keep.extend(watchers[idx + 1 :])
                        self.qhead = len(self.trail)
                        return clause
                    self.enqueue(first, clause)
                    self.propagations += 1
        return None

    # -- activities ----------------------------------------------------------

    def bump_var(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > self.config.rescale_threshold:
            for u in range(1, self.n + 1):
                self.activity[u] *= VAR_RESCALE_FACTOR
            self.var_inc *= VAR_RESCALE_FACTOR

    def bump_clause(self, clause: _Clause) -> None:
        clause.activity += self.cla_inc
        if clause.activity > CLAUSE_RESCALE_LIMIT:
            for c in self.learnts:
                c.activity *= 1.0 / CLAUSE_RESCALE_LIMIT
            self.cla_inc *= 1.0 / CLAUSE_RESCALE_LIMIT

    # -- conflict analysis ---------------------------------------------------

    def analyze(self, confl: _Clause) -> tuple[list[int], int]:
        """First-UIP learning; returns (learnt literals, backjump level).

        The asserting literal ends up at position 0 and a literal from the
        backjump level at position 1.
        """
        seen = [False] * (self.n + 1)
        learnt: list[int] = [0]  # placeholder for the asserting literal
        counter = 0
        p = 0
        idx = len(self.trail) - 1
        current = len(self.trail_lim)
        clause = confl

        while True:
            if clause.learnt:
                self.bump_clause(clause)
            start = 0 if p == 0 else 1  # lits[0] is the resolved literal
            for j in range(start, len(clause.lits)):
                q = clause.lits[j]
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    if self.level[v] == current:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            v = abs(p)
            seen[v] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[v]
            idx -= 1

        learnt[0] = -p
        if len(learnt) == 1:
            bt_level = 0
        else:
            max_i = 1
            for i in range(2, len(learnt)):
                if self.level[abs(learnt[i])] > self.level[abs(learnt[max_i])]:
                    max_i = i
            learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
            bt_level = self.level[abs(learnt[1])]
        return learnt, bt_level

    # -- learned clause database ----------------------------------------------

    def reduce_db(self) -> None:
        """Drop roughly half of the learned clauses, lowest activity first.

        Binary and locked (currently-reason) clauses are kept; the
        surviving half is additionally filtered against cla_inc/len.
        """
        self.learnts.sort(key=lambda c: c.activity)
        extra_lim = self.cla_inc / len(self.learnts)
        half = len(self.learnts) // 2
        kept: list[_Clause] = []
        for i, clause in enumerate(self.learnts):
            removable = len(clause.lits) > 2 and not self.locked(clause)
            if removable and (i < half or clause.activity < extra_lim):
                self.detach(clause)
            else:
                kept.append(clause)
        self.learnts = kept

    # -- search --------------------------------------------------------------

    def decide(self) -> None:
        unassigned = [v for v in range(1, self.n + 1) if self.assigns[v] is None]
        if self.rng.random() < self.config.random_decision_freq:
            v = unassigned[self.rng.randrange(len(unassigned))]
        else:
            best = -math.inf
            ties: list[int] = []
            act = self.activity
            for v in unassigned:
                a = act[v]
                if a > best:
                    best = a
                    ties = [v]
                elif a == best:
                    ties.append(v)
            v = ties[0] if len(ties) == 1 else ties[self.rng.randrange(len(ties))]
        self.decisions += 1
        self.trail_lim.append(len(self.trail))
        self.enqueue(-v, None)  # false first

    def run(self) -> tuple[str, dict[int, bool] | None]:
        for clause_lits in self.cnf.clauses:
            if len(clause_lits) == 0:
                return "unsat", None
            if len(clause_lits) == 1:
                lit = clause_lits[0]
                val = self.value(lit)
                if val is False:
                    return "unsat", None
                if val is None:
                    self.enqueue(lit, None)
            else:
                self.attach(_Clause(list(clause_lits)))

        max_learnts = len(self.cnf.clauses) * self.config.learnt_db_initial_fraction
        restart_budget = float(self.config.restart_first)
        conflicts_since_restart = 0

        while True:
            confl = self.propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts_since_restart += 1
                if not self.trail_lim:
                    return "unsat", None
                learnt, bt_level = self.analyze(confl)
                self.cancel_until(bt_level)
                if len(learnt) == 1:
                    self.enqueue(learnt[0], None)
                else:
                    clause = _Clause(learnt, learnt=True)
                    self.attach(clause)
                    self.learnts.append(clause)
                    self.bump_clause(clause)
                    self.enqueue(learnt[0], clause)
                for lit in learnt:
                    self.bump_var(abs(lit))
                self.var_inc /= self.config.var_decay
                self.cla_inc /= self.config.clause_decay
            else:
                if conflicts_since_restart >= restart_budget:
                    # Restart: back to level 0, keep clauses and activities.
                    conflicts_since_restart = 0
                    restart_budget *= self.config.restart_factor
                    max_learnts *= self.config.learnt_db_growth
                    self.cancel_until(0)
                    continue
                if len(self.learnts) - len(self.trail) >= max_learnts:
                    self.reduce_db()
                if len(self.trail) == self.n:
                    model = {v: bool(self.assigns[v]) for v in range(1, self.n + 1)}
                    self._verify(model)
                    return "sat", model
                self.decide()

    def _verify(self, model: dict[int, bool]) -> None:
        for clause in self.cnf.clauses:
            if not any(model[abs(lit)] == (lit > 0) for lit in clause):
                raise RuntimeError(
                    f"internal error: model does not satisfy clause {clause}"
                )


def solve(cnf: Cnf, init: list[float], config: SolverConfig | None = None) -> SolveOutcome:
    """Complete search over `cnf` starting from the given initial activities.

    `init` must contain one finite value per variable (index v-1 for
    variable v).  The input is expected to be free of unit clauses (run
    preprocess_bcp first); unit and empty clauses are still handled as
    degenerate cases.  Identical (cnf, init, config) always produces an
    identical outcome apart from wall_time.
    """
    if config is None:
        config = SolverConfig()
    config.validate()
    if len(init) != cnf.num_vars:
        raise ValueError(
            f"init length {len(init)} does not match num_vars {cnf.num_vars}"
        )
    for i, a in enumerate(init):
        if not math.isfinite(a):
            raise ValueError(f"non-finite initial activity at variable {i + 1}")

    start = time.perf_counter()
    if not cnf.clauses:
        model = {v: False for v in range(1, cnf.num_vars + 1)}
        return SolveOutcome("sat", 0, 0, 0, model, time.perf_counter() - start)

    search = _Search(cnf, init, config)
    verdict, model = search.run()
    return SolveOutcome(
        verdict=verdict,
        conflicts=search.conflicts,
        decisions=search.decisions,
        propagations=search.propagations,
        model=model,
        wall_time=time.perf_counter() - start,
    )


def solve_with_baseline(cnf: Cnf, config: SolverConfig | None = None) -> SolveOutcome:
    """Solve with the standard all-zero initialization.

    The conflict count of this run is the baseline against which other
    initializations of the same problem/config/seed are compared.
    """
    return solve(cnf, [0.0] * cnf.num_vars, config)
