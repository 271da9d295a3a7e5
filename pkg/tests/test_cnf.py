import pytest
from hypothesis import given, settings, strategies as st

from oracles import recount_stats, truth_table_satisfiable
from conftest import make_random_cnf
from satgp.cnf import (
    Cnf,
    DimacsError,
    IDENTITY_SEED,
    compute_var_stats,
    parse_dimacs,
    parse_dimacs_report,
    preprocess_bcp,
    random_3sat,
    read_mapping,
    reorder,
    write_dimacs,
    write_mapping,
)
from satgp.rng import SplitMix64


class TestParse:
    def test_basic(self):
        cnf = parse_dimacs("p cnf 2 2\n1 2 0\n-1 2 0\n")
        assert cnf.num_vars == 2
        assert cnf.clauses == ((1, 2), (-1, 2))

    def test_tautology_dropped(self):
        cnf, report = parse_dimacs_report("p cnf 1 1\n1 -1 0\n")
        assert cnf.clauses == ()
        assert report.tautologies_dropped == 1

    def test_variable_out_of_range(self):
        with pytest.raises(DimacsError, match="variable 4 exceeds declared 3"):
            parse_dimacs("p cnf 3 1\n4 0\n")

    def test_duplicate_literal_removed(self):
        cnf, report = parse_dimacs_report("p cnf 2 1\n1 1 2 0\n")
        assert cnf.clauses == ((1, 2),)
        assert report.duplicate_literals_removed == 1

    def test_comments_crlf_and_multiline_clause(self):
        text = "c hello\r\np cnf 3 1\r\n1 2\r\n3 0\r\n"
        cnf = parse_dimacs(text)
        assert cnf.clauses == ((1, 2, 3),)

    def test_bytes_input(self):
        assert parse_dimacs(b"p cnf 1 1\n1 0\n").clauses == ((1,),)

    def test_satlib_percent_tail(self):
        cnf = parse_dimacs("p cnf 1 1\n1 0\n%\n0\n")
        assert cnf.clauses == ((1,),)

    def test_count_mismatch_warns_not_fails(self, caplog):
        with caplog.at_level("WARNING"):
            cnf = parse_dimacs("p cnf 2 5\n1 0\n")
        assert cnf.num_clauses == 1
        assert any("declares 5" in r.message for r in caplog.records)

    def test_malformed_header(self):
        with pytest.raises(DimacsError, match="header"):
            parse_dimacs("p dnf 2 1\n1 0\n")

    def test_clause_before_header(self):
        with pytest.raises(DimacsError, match="before"):
            parse_dimacs("1 0\np cnf 1 1\n")

    def test_non_integer_token(self):
        with pytest.raises(DimacsError, match="non-integer"):
            parse_dimacs("p cnf 1 1\nx 0\n")

    def test_unterminated_clause(self):
        with pytest.raises(DimacsError, match="unterminated"):
            parse_dimacs("p cnf 2 1\n1 2\n")

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32))
    def test_roundtrip(self, seed):
        rng = SplitMix64(seed)
        cnf = make_random_cnf(rng, 1 + rng.randrange(12), rng.randrange(20))
        assert parse_dimacs(write_dimacs(cnf)) == cnf


class TestVarStats:
    def test_example(self):
        cnf = Cnf.from_lists(2, [[1, 2], [-1, 2]])
        stats = compute_var_stats(cnf)
        assert (stats.xn[1], stats.xp[1], stats.xc[1]) == (1, 1, 2)
        assert (stats.xn[2], stats.xp[2], stats.xc[2]) == (0, 2, 2)

    def test_empty(self):
        stats = compute_var_stats(Cnf(3, ()))
        assert stats.xc == [0, 0, 0, 0]

    def test_against_recount_oracle(self):
        rng = SplitMix64(11)
        for _ in range(100):
            cnf = make_random_cnf(rng, 2 + rng.randrange(10), rng.randrange(25))
            stats = compute_var_stats(cnf)
            xn, xp, xc = recount_stats(cnf)
            for v in range(1, cnf.num_vars + 1):
                assert stats.xn[v] == xn[v]
                assert stats.xp[v] == xp[v]
                assert stats.xc[v] == xc[v]

    def test_totals_match_clause_widths(self):
        rng = SplitMix64(12)
        for _ in range(20):
            cnf = make_random_cnf(rng, 8, 15)
            stats = compute_var_stats(cnf)
            assert sum(stats.xc) == sum(len(c) for c in cnf.clauses)


class TestPreprocessBcp:
    def test_unit_chain_satisfied(self):
        cnf = Cnf.from_lists(3, [[1], [-1, 2], [-2, 3]])
        reduced, verdict, forced = preprocess_bcp(cnf)
        assert verdict == "satisfied"
        assert forced == [1, 2, 3]
        assert reduced.clauses == ()

    def test_contradiction(self):
        _, verdict, _ = preprocess_bcp(Cnf.from_lists(1, [[1], [-1]]))
        assert verdict == "unsatisfiable"

    def test_no_units_untouched(self):
        cnf = Cnf.from_lists(3, [[1, 2], [-1, 3]])
        reduced, verdict, forced = preprocess_bcp(cnf)
        assert verdict == "reduced"
        assert forced == []
        assert reduced == cnf

    def test_idempotent(self):
        rng = SplitMix64(21)
        for _ in range(50):
            cnf = make_random_cnf(rng, 2 + rng.randrange(8), 1 + rng.randrange(18))
            once, verdict, _ = preprocess_bcp(cnf)
            if verdict != "reduced":
                continue
            twice, verdict2, forced2 = preprocess_bcp(once)
            assert verdict2 == "reduced"
            assert forced2 == []
            assert twice == once

    def test_equisatisfiable_with_original(self):
        rng = SplitMix64(22)
        checked = 0
        for _ in range(200):
            cnf = make_random_cnf(rng, 2 + rng.randrange(12), 1 + rng.randrange(25))
            reduced, verdict, _ = preprocess_bcp(cnf)
            original_sat = truth_table_satisfiable(cnf)
            if verdict == "unsatisfiable":
                assert original_sat is False
            elif verdict == "satisfied":
                assert original_sat is True
            else:
                assert truth_table_satisfiable(reduced) == original_sat
            checked += 1
        assert checked == 200

    def test_preserves_surviving_clause_order(self):
        cnf = Cnf.from_lists(4, [[2, 3], [1], [3, 4], [-1, 2, 3]])
        reduced, verdict, forced = preprocess_bcp(cnf)
        assert verdict == "reduced"
        assert forced == [1]
        assert reduced.clauses == ((2, 3), (3, 4), (2, 3))


class TestReorder:
    def test_deterministic(self):
        cnf = random_3sat(15, 40, seed=5)
        a, map_a = reorder(cnf, 99)
        b, map_b = reorder(cnf, 99)
        assert a == b
        assert map_a.var_map == map_b.var_map
        assert map_a.inverted == map_b.inverted
        assert map_a.clause_map == map_b.clause_map

    def test_identity_sentinel(self):
        cnf = random_3sat(10, 20, seed=1)
        out, mapping = reorder(cnf, IDENTITY_SEED)
        assert out == cnf
        assert mapping.var_map == list(range(cnf.num_vars + 1))
        assert not any(mapping.inverted)

    def test_inverse_mapping_recovers_input(self):
        rng = SplitMix64(31)
        for trial in range(30):
            cnf = make_random_cnf(rng, 2 + rng.randrange(10), 1 + rng.randrange(20))
            out, mapping = reorder(cnf, trial)
            for new_idx, clause in enumerate(out.clauses):
                original = cnf.clauses[mapping.clause_map[new_idx]]
                recovered = tuple(mapping.unmap_literal(l) for l in clause)
                assert recovered == original

    def test_preserves_shape(self):
        cnf = random_3sat(12, 30, seed=3)
        out, _ = reorder(cnf, 17)
        assert out.num_vars == cnf.num_vars
        assert len(out.clauses) == len(cnf.clauses)
        assert sorted(map(len, out.clauses)) == sorted(map(len, cnf.clauses))

    def test_equisatisfiable_100_instances(self):
        rng = SplitMix64(32)
        for trial in range(100):
            cnf = make_random_cnf(
                rng, 3 + rng.randrange(10), 1 + rng.randrange(22), min_width=1
            )
            out, _ = reorder(cnf, trial * 7 + 1)
            assert truth_table_satisfiable(out) == truth_table_satisfiable(cnf)

    def test_mapping_sidecar_roundtrip(self):
        cnf = random_3sat(9, 18, seed=8)
        _, mapping = reorder(cnf, 44)
        recovered = read_mapping(write_mapping(mapping))
        assert recovered.var_map == mapping.var_map
        assert recovered.inverted == mapping.inverted
        assert recovered.clause_map == mapping.clause_map
