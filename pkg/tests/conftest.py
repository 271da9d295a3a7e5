import pytest

from satgp.cnf import Cnf
from satgp.rng import SplitMix64


def make_random_cnf(rng: SplitMix64, num_vars: int, num_clauses: int,
                    min_width: int = 1, max_width: int = 4) -> Cnf:
    """Random CNF with distinct variables per clause (no tautologies)."""
    clauses = []
    for _ in range(num_clauses):
        width = min_width + rng.randrange(max_width - min_width + 1)
        width = min(width, num_vars)
        vars_ = []
        while len(vars_) < width:
            v = rng.randrange(num_vars) + 1
            if v not in vars_:
                vars_.append(v)
        clauses.append(tuple(v if rng.flip() else -v for v in vars_))
    return Cnf(num_vars, tuple(clauses))


@pytest.fixture
def rng():
    return SplitMix64(0xC0FFEE)
