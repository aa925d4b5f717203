import json
from fractions import Fraction

import numpy as np
import pytest

from fsmdim.alphabet import SymbolString, prefix_truncate
from fsmdim.errors import InstanceTooLarge, InvalidArgument, UnknownCheck
from fsmdim.fsc import Fsc, epsilon_fsc, identity_fsc, output_length
from fsmdim.verify import (
    CHECKS, CheckResult, Recorder, brute_force_oracle, compare_golden, expand_selection, obs1_assert,
    report_json, run_check, run_suite,
)


def test_every_check_passes_briefly():
    report = run_suite(["all"], trials=3, seed=7)
    failing = [c for c in report["checks"] if not c["passed"]]
    assert report["passed"], failing
    assert report["schema_version"] == 1


@pytest.mark.parametrize("name", ["pmi.diagonal", "kraft"])
def test_named_examples(name):
    assert run_check(name, trials=10, seed=0).passed


def test_mcr_all_budgets():
    r = run_check("mcr.all", trials=10, seed=3)
    assert r.passed and r.assertions == 10 * 4 * 6


def test_deterministic_and_isolated():
    a = report_json(run_suite(["kraft", "huff"], trials=4, seed=5))
    b = report_json(run_suite(["kraft", "huff"], trials=4, seed=5))
    assert a == b
    alone = run_suite(["huff"], trials=4, seed=5)["checks"][0]
    assert alone == json.loads(a)["checks"][1]


def test_golden_compare():
    rep = run_suite(["shac"], trials=3, seed=1)
    golden = json.loads(report_json(rep))
    assert compare_golden(rep, golden) == []
    golden["checks"][0]["assertions"] += 1
    assert compare_golden(rep, golden) == ["check shac.1 differs"]


def test_selection():
    assert expand_selection("mcr") == [f"mcr.{i}" for i in "123456"]
    assert "md" not in expand_selection("all")
    assert set(expand_selection("all")) | {"md", "mcr.all"} == set(CHECKS)
    with pytest.raises(UnknownCheck):
        run_suite(["nosuch"])
    with pytest.raises(InvalidArgument):
        run_check("kraft", trials=0)


def test_labels():
    assert CHECKS["bmur"][1] == "asymptotic-surrogate"
    assert CHECKS["low"][1] == "exact"


class TestOracle:
    def test_entropy(self):
        assert brute_force_oracle("entropy", [1, 1]) == 1.0
        assert brute_force_oracle("entropy", [2, 1, 1]) == 1.5

    def test_huffman(self):
        res = brute_force_oracle("huffman-optimal", [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
        assert res["expected_length"] == Fraction(3, 2) and res["lengths"] == [1, 2, 2]
        assert brute_force_oracle("huffman-optimal", [5])["expected_length"] == 1
        with pytest.raises(InstanceTooLarge):
            brute_force_oracle("huffman-optimal", [1] * 17)

    def test_il(self):
        assert brute_force_oracle("il-collision", (epsilon_fsc(2), 3)) == ((0,), (0, 0))
        assert brute_force_oracle("il-collision", (identity_fsc(2), 6)) is None
        with pytest.raises(InstanceTooLarge):
            brute_force_oracle("il-collision", (identity_fsc(2), 13))
        with pytest.raises(InstanceTooLarge):
            brute_force_oracle("il-collision", (identity_fsc(9), 9))

    def test_unknown(self):
        with pytest.raises(InvalidArgument):
            brute_force_oracle("nope", None)


class TestTruncationBound:
    # emits 8 bits per 1 and nothing per 0, so the prefix compresses worse than the whole
    EXPANDER = Fsc(np.array([[0, 0]]), (("", "11111111"),))

    def test_printed_form_fails_without_precondition(self):
        u = SymbolString.from_digits("111111110", 2)
        cut = prefix_truncate(u, 2)
        lhs = output_length(self.EXPANDER, cut) / len(cut)
        rho = output_length(self.EXPANDER, u) / len(u)
        assert lhs > rho + 1 / (len(u) // 2)
        res = CheckResult("obs1", "exact", 1)
        obs1_assert(Recorder(res), self.EXPANDER, u, cut, len(u), 2, 2, {})
        assert res.assertions == 1 and res.passed  # only the scaled form applies

    def test_both_forms_under_precondition(self):
        u = SymbolString.from_digits("0000000001", 2)
        cut = prefix_truncate(u, 3)
        res = CheckResult("obs1", "exact", 1)
        obs1_assert(Recorder(res), identity_fsc(2), u, cut, len(u), 3, 2, {})
        assert res.assertions == 2 and res.passed
