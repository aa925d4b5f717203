import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import S, string_pairs, strings
from fsmdim.alphabet import ProbMeasure, SymbolString, gen_iid, pair
from fsmdim.blockstats import block_freq_table, shannon_entropy
from fsmdim.errors import BudgetTooSmall, EmptyInput, ZeroSelfInformation
from fsmdim.fsc import epsilon_fsc, identity_fsc, output_length
from fsmdim.huffman import build_for_string
from fsmdim.ratios import (
    RatioCache, SlackParams, catalog_rho, catalog_rho_joint, f_slack, joint_catalog, log_floor,
    mcr_items, mi_cross_check, mutual_ratio, rho_beta, rho_c, rho_c_joint, single_catalog, slack,
)


class TestSlack:
    def test_log_floor(self):
        assert [log_floor(r, 2) for r in (1, 2, 3, 4, 15, 16)] == [0, 1, 1, 2, 3, 4]
        assert log_floor(9, 3) == 2 and log_floor(8, 3) == 1

    def test_f_values(self):
        assert f_slack(1, 2, 1) == pytest.approx(math.log2(1 + math.log2(3)), abs=1e-14)
        v = f_slack(1, 2, 32)
        assert v < 0.2
        assert v == pytest.approx(math.log2(1 + math.log2(1 + 2**32)) / 32, abs=1e-14)

    @given(st.integers(1, 64), st.sampled_from([2, 3]), st.integers(1, 20))
    def test_q_equals_h(self, t, k, m):
        assert slack("q", t, k, m) == slack("h", t, k, m)

    @given(st.integers(1, 8), st.sampled_from([2, 3]))
    def test_f_vanishes(self, s, k):
        vals = [f_slack(s, k, r) for r in (10, 100, 1000)]
        assert vals[0] > vals[1] > vals[2]

    def test_budget_too_small(self):
        with pytest.raises(BudgetTooSmall):
            SlackParams(1, 4, 2)


class TestRatios:
    def test_rho_c(self):
        u = S("0110100")
        assert rho_c(identity_fsc(2), u) == 1.0
        assert rho_c(epsilon_fsc(2), u) == 0.0
        assert rho_c(build_for_string(S("0" * 64), 2), S("0" * 64)) == 0.5
        with pytest.raises(EmptyInput):
            rho_c(identity_fsc(2), S(""))

    def test_rho_c_joint(self):
        u, w = S("0110"), S("1100")
        assert rho_c_joint(identity_fsc(4), u, w) == 2.0
        assert rho_c_joint(epsilon_fsc(4), u, w) == 0.0

    def test_diagonal_pair_huffman_overhead(self):
        u = gen_iid(ProbMeasure.parse("3/4,1/4"), 2000, 3)
        single = output_length(build_for_string(u, 1), u)
        joint = output_length(build_for_string(pair(u, u), 1), pair(u, u))
        # zero-weight off-diagonal codewords can cost the rarer symbol at most one extra bit
        rare = min(block_freq_table(u, 1).counts.values())
        assert single <= joint <= single + rare

    def test_rho_beta(self):
        u = S("0" * 40)
        C = identity_fsc(2)
        assert rho_beta(C, S("0110"), ProbMeasure.uniform(2)) == rho_c(C, S("0110"))
        assert rho_beta(C, u, ProbMeasure.parse("3/4,1/4")) == pytest.approx(1 / math.log2(4 / 3))
        assert rho_beta(epsilon_fsc(2), u, ProbMeasure.parse("3/4,1/4")) == 0.0
        with pytest.raises(ZeroSelfInformation):
            rho_beta(C, u, ProbMeasure.point_mass(2, 0))


class TestCatalog:
    def test_zeros(self):
        u = S("0" * 64)
        assert catalog_rho(u, 2).upper == 1.0
        assert catalog_rho(u, 4).upper == 0.5

    def test_budget(self):
        with pytest.raises(BudgetTooSmall):
            single_catalog(S("01"), 1)
        with pytest.raises(BudgetTooSmall):
            joint_catalog(S("01"), S("01"), 3)

    @given(strings(min_len=1, max_len=80), st.integers(3, 40))
    def test_lower_bound_below_catalog(self, u, r):
        rep = catalog_rho(u, r)
        assert rep.lower <= rep.upper + 1e-12

    @given(string_pairs(min_len=1, max_len=60), st.sampled_from([9, 16, 81]))
    def test_joint_swap_symmetric(self, uw, r):
        u, w = uw
        if r < u.k ** 2:
            return
        a, b = catalog_rho_joint(u, w, r), catalog_rho_joint(w, u, r)
        assert a.upper == b.upper
        assert a.lower <= a.upper + 1e-12

    def test_independent_joint_near_two(self):
        u = gen_iid(ProbMeasure.uniform(2), 1 << 16, 11)
        w = gen_iid(ProbMeasure.uniform(2), 1 << 16, 12)
        assert catalog_rho_joint(u, w, 4).upper == pytest.approx(2.0, abs=0.01)

    def test_eq_on_diagonal(self):
        u = gen_iid(ProbMeasure.parse("3/4,1/4"), 4096, 2)
        cache = RatioCache(u, u, 16)
        sp = SlackParams(16, 16, 2)
        n = len(u)
        assert cache.rho_joint(16) <= cache.rho("u", 16) + 1 / (n // sp.r_prime) + sp["i"]
        assert cache.rho("u", 16) <= cache.rho_joint(16) + 1 / (n // sp.t_prime) + sp["j"]


class TestMutualRatio:
    def test_diagonal_bracket(self):
        u = gen_iid(ProbMeasure.parse("3/4,1/4"), 4096, 9)
        rep = mutual_ratio(u, u, 16, 16)
        sp = SlackParams(16, 16, 2)
        n = len(u)
        assert rep.items["3"]["holds"] and rep.items["4"]["holds"]
        assert rep.rho_t_u - 1 / (n // sp.r_prime) - sp["i"] <= rep.value
        assert rep.value <= rep.rho_t_u + 1 / (n // sp.t_prime) + sp["j"]

    def test_independent_pair(self):
        u = gen_iid(ProbMeasure.uniform(2), 1 << 16, 21)
        w = gen_iid(ProbMeasure.uniform(2), 1 << 16, 22)
        rep = mutual_ratio(u, w, 16, 16)
        assert rep.items["1"]["holds"] and rep.items["2"]["holds"]
        assert rep.value == rep.swapped_value

    @given(string_pairs(k=2, min_len=16, max_len=200))
    def test_mcr_items(self, uw):
        u, w = uw
        cache = RatioCache(u, w, 16)
        for r, t in [(4, 4), (16, 4), (4, 16), (16, 16)]:
            items = mcr_items(cache, r, t)
            assert all(it["holds"] for it in items.values())
            assert items["5"]["lhs"] == items["5"]["rhs"]
            check = mi_cross_check(u, w, r, t, cache)
            assert check["mitomc"]["holds"] and check["mctomi"]["holds"]
