"""Independent reference implementations used only by the tests.

These deliberately avoid the package's own code paths: satisfiability is
decided by exhaustive truth-table enumeration (vectorized with numpy) and
statistics are recounted with a plain dictionary double loop.
"""

from __future__ import annotations

import numpy as np

MAX_ORACLE_VARS = 20


def truth_table_satisfiable(cnf) -> bool:
    """Brute-force satisfiability over all 2^n assignments."""
    n = cnf.num_vars
    if n > MAX_ORACLE_VARS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_VARS} variables")
    if any(len(c) == 0 for c in cnf.clauses):
        return False
    total = 1 << n
    indices = np.arange(total, dtype=np.uint32)
    alive = np.ones(total, dtype=bool)
    for clause in cnf.clauses:
        satisfied = np.zeros(total, dtype=bool)
        for lit in clause:
            bit = (indices >> (abs(lit) - 1)) & 1
            satisfied |= bit == (1 if lit > 0 else 0)
        alive &= satisfied
        if not alive.any():
            return False
    return bool(alive.any())


def model_satisfies(cnf, model: dict[int, bool]) -> bool:
    """Check a model against every clause, the boring way."""
    for clause in cnf.clauses:
        if not any(model[abs(lit)] == (lit > 0) for lit in clause):
            return False
    return True


def recount_stats(cnf) -> tuple[dict, dict, dict]:
    """Naive occurrence recount; returns (xn, xp, xc) dicts."""
    xn = {v: 0 for v in range(1, cnf.num_vars + 1)}
    xp = {v: 0 for v in range(1, cnf.num_vars + 1)}
    for clause in cnf.clauses:
        for lit in clause:
            if lit > 0:
                xp[lit] += 1
            else:
                xn[-lit] += 1
    xc = {v: xn[v] + xp[v] for v in xn}
    return xn, xp, xc
