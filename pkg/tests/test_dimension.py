import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import strings
from fsmdim.alphabet import ProbMeasure, SymbolString, gen_champernowne, gen_iid, gen_periodic
from fsmdim.blockstats import shannon_entropy
from fsmdim.dimension import (
    coverage_ell, default_n_grid, divergence_prediction, entropy_rate_curve, estimate_beta_dim,
    estimate_dim, estimate_joint_dim, estimate_mdim, joint_entropy_rate_curve,
    mutual_info_rate_curve, normality_test, pair_rate_curves, self_information_rate,
)
from fsmdim.errors import GridExceedsPrefix, InvalidArgument, LengthMismatch
from fsmdim.ratios import catalog_rho

N18 = 1 << 18


@pytest.fixture(scope="module")
def champ():
    return gen_champernowne(2, N18)


@pytest.fixture(scope="module")
def indep():
    u = ProbMeasure.uniform(2)
    return gen_iid(u, N18, 101), gen_iid(u, N18, 202)


def flip(u):
    return SymbolString(u.alphabet, 1 - u.data)


class TestCurves:
    def test_periodic(self):
        u = gen_periodic([0, 1], 4096)
        g = entropy_rate_curve(u, [1, 2], [64, 1024, 4096])
        assert np.all(g.row(1) == 1.0) and np.all(g.row(2) == 0.0)

    def test_champernowne_ell1(self, champ):
        assert entropy_rate_curve(champ, [1], [N18]).value(1, N18) >= 0.97

    @given(strings(min_len=16, max_len=128))
    def test_diagonal_and_relabel(self, u):
        ns = [8, len(u)]
        base = entropy_rate_curve(u, [1, 2], ns).values
        assert np.array_equal(joint_entropy_rate_curve(u, u, [1, 2], ns).values, base)
        assert np.array_equal(mutual_info_rate_curve(u, u, [1, 2], ns).values, base)
        if u.k == 2:
            w = flip(u)
            assert np.array_equal(joint_entropy_rate_curve(u, w, [1, 2], ns).values, base)
            assert np.array_equal(mutual_info_rate_curve(u, w, [1, 2], ns).values, base)

    def test_independent_pair(self, indep):
        u, w = indep
        curves = pair_rate_curves(u, w, [1, 2], [N18])
        assert curves["joint"].value(1, N18) == pytest.approx(2.0, abs=0.01)
        assert curves["mutual"].values.max() <= 0.02

    def test_grid_validation(self):
        u = gen_periodic([0, 1], 100)
        with pytest.raises(GridExceedsPrefix):
            estimate_dim(u, n_grid=[50, 200])
        with pytest.raises(InvalidArgument):
            estimate_dim(u, ell_max=0)
        assert default_n_grid(5000) == [1024, 2048, 4096, 5000]

    def test_csv(self):
        g = entropy_rate_curve(gen_periodic([0, 1], 64), [1], [32, 64])
        assert g.to_csv().splitlines() == ["ell,n,value", "1,32,1.0", "1,64,1.0"]


class TestEstimates:
    def test_periodic_zero(self):
        u = gen_periodic([0, 1], 1 << 15)
        est = estimate_dim(u, ell_max=4)
        assert est.lower == est.upper == 0.0

    def test_coverage_warning(self):
        est = estimate_dim(gen_periodic([0, 1], 5000), ell_max=6)
        assert est.ell_star == coverage_ell(5000, 2, 6) == 3
        assert "ell_max=6" in est.warning
        assert estimate_dim(gen_periodic([0, 1], 5000), ell_max=3).warning is None

    def test_champernowne(self, champ):
        est = estimate_dim(champ, ell_max=3)
        assert est.lower >= 0.95

    def test_iid_entropy(self):
        beta = ProbMeasure.parse("3/4,1/4")
        u = gen_iid(beta, N18, 5)
        est = estimate_dim(u, ell_max=1)
        assert est.tail(1)["tail_lower"] == pytest.approx(shannon_entropy(beta), abs=0.01)

    def test_mdim_diagonal(self, champ):
        a = estimate_dim(champ)
        b = estimate_mdim(champ, champ, cross_check=False)
        assert np.array_equal(a.grid.values, b.grid.values)
        assert (a.lower, a.upper) == (b.lower, b.upper)

    def test_mdim_independent(self, indep):
        est = estimate_mdim(*indep)
        assert est.to_dict()["estimate"]["upper"] <= 0.02
        assert all(c["mitomc"]["holds"] and c["mctomi"]["holds"] for c in est.extras["cross_check"])

    def test_mdim_shift_positive(self, champ):
        w = SymbolString(champ.alphabet, np.roll(champ.data, 1))
        est = estimate_mdim(champ, w, cross_check=False)
        assert est.tail(1)["tail_lower"] > 0
        assert est.lower > 0.5

    def test_joint_range(self, indep):
        d = estimate_joint_dim(*indep).to_dict()
        assert d["estimate"]["range"] == [0.0, 2.0]
        with pytest.raises(LengthMismatch):
            estimate_joint_dim(indep[0], indep[1][:10])


class TestBeta:
    def test_uniform_matches_catalog(self):
        u = gen_iid(ProbMeasure.parse("3/4,1/4"), 4096, 1)
        est = estimate_beta_dim(u, ProbMeasure.uniform(2), r=8, n_grid=[1024, 4096])
        assert est.values == [catalog_rho(u[:n], 8).upper for n in (1024, 4096)]

    def test_iid(self):
        beta = ProbMeasure.parse("3/4,1/4")
        est = estimate_beta_dim(gen_iid(beta, N18, 3), beta, r=16)
        assert 0.9 <= est.lower <= est.upper <= 1.02

    def test_zeros(self):
        est = estimate_beta_dim(SymbolString.from_digits("0" * 4096, 2), ProbMeasure.uniform(2), r=4)
        assert est.lower == est.upper == 0.5


class TestNormality:
    def test_point_mass(self):
        u = SymbolString.from_digits("1" * 120, 2)
        rep = normality_test(u, ProbMeasure.point_mass(2, 1), 3)
        assert all(row["max_deviation"] == 0 for row in rep["per_ell"])

    def test_periodic(self):
        rep = normality_test(gen_periodic([0, 1], 1024), ProbMeasure.uniform(2), 2)
        assert rep["per_ell"][1]["max_deviation"] == 0.75

    def test_champernowne_bias(self, champ):
        # numerals all start with 1, so ones are over-represented at this n
        ones = int(champ.data.sum())
        rep = normality_test(champ, ProbMeasure.uniform(2), 1)
        assert rep["per_ell"][0]["max_deviation"] == pytest.approx(ones / N18 - 0.5, abs=1e-15)
        assert rep["per_ell"][0]["max_deviation"] < 0.025

    def test_divergence_law(self):
        alpha, beta = ProbMeasure.parse("3/4,1/4"), ProbMeasure.parse("1/3,2/3")
        u = gen_iid(alpha, N18, 17)
        assert self_information_rate(u, beta) == pytest.approx(divergence_prediction(alpha, beta), abs=0.02)
