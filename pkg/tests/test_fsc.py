import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import S, TOGGLE, machines, strings
from fsmdim.alphabet import pair
from fsmdim.errors import (
    BudgetExceeded, InvalidArgument, MachineFormatError, NotProductAlphabet,
    StateOutOfRange, SymbolOutOfRange,
)
from fsmdim.fsc import (
    CERT_PREFIX_CODE, Fsc, check_il, epsilon_fsc, final_state, identity_fsc, kraft_audit,
    kraft_rhs, min_lengths_for_blocks, min_output_len, output_length, relabel_swap,
    replay_witness, run, run_from,
)
from fsmdim.huffman import HuffmanCodebook, build_for_string, huffman_ilfsc
from fsmdim.verify import brute_force_oracle


class TestRun:
    def test_identity(self):
        assert run(identity_fsc(2), S("011")) == "011"
        assert run(identity_fsc(3), S("21", 3)) == "1001"

    def test_empty_input(self):
        assert run(TOGGLE, S("")) == ""

    def test_toggle_fixture(self):
        assert run(TOGGLE, S("000")) == "1"
        assert final_state(TOGGLE, S("000")) == 1

    def test_run_from(self):
        u = S("0110")
        assert run_from(TOGGLE, 0, u) == run(TOGGLE, u)
        assert run_from(TOGGLE, 1, S("")) == ""
        assert run_from(identity_fsc(2), 0, u) == run(identity_fsc(2), u)
        with pytest.raises(StateOutOfRange):
            run_from(TOGGLE, 2, u)

    def test_symbol_range(self):
        with pytest.raises(SymbolOutOfRange):
            run(identity_fsc(2), S("2", 3))

    @given(machines(m=2), strings(k=2, max_len=30))
    def test_length_matches_run(self, C, u):
        assert output_length(C, u) == len(run(C, u))


class TestMinLength:
    def test_identity(self):
        assert min_output_len(identity_fsc(2), S("0110")) == 4

    def test_absorbing_silent_state(self):
        C = Fsc(np.array([[1, 1], [1, 1]]), (("1", "1"), ("", "")))
        assert min_output_len(C, S("0101")) == 0

    def test_huffman_block_from_root(self):
        C = build_for_string(S("00000001"), 2)
        w = S("01")
        assert min_output_len(C, w) == min(len(run_from(C, q, w)) for q in range(C.n_states))
        assert min_output_len(C, w) <= len(run(C, w))

    @given(machines(m=2), st.integers(1, 4))
    def test_vectorized_matches_direct(self, C, r):
        L = min_lengths_for_blocks(C, r)
        for code, word in enumerate(itertools.product(range(2), repeat=r)):
            assert L[code] == min_output_len(C, S("".join(map(str, word))))


class TestKraft:
    def test_identity(self):
        rep = kraft_audit(identity_fsc(2), 3)
        assert rep.lhs == 1 and rep.holds
        assert rep.rhs == pytest.approx(1 + np.log2(9))

    def test_lossy_machine_fails(self):
        rep = kraft_audit(epsilon_fsc(2), 3)
        assert rep.lhs == 8 and not rep.holds

    @given(machines(m=2, max_states=3), st.integers(1, 6))
    def test_dp_matches_enumeration(self, C, r):
        a = kraft_audit(C, r, method="enumerate")
        b = kraft_audit(C, r, method="dp")
        assert a.lhs == b.lhs and isinstance(a.lhs, Fraction)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            kraft_audit(identity_fsc(2), 12, budget=100, method="enumerate")
        assert kraft_audit(identity_fsc(4), 12, budget=100).method == "dp"

    @settings(max_examples=40)
    @given(machines(m=2, max_states=3, max_out=2))
    def test_lossless_machines_satisfy_kraft(self, C):
        if check_il(C).status != "verified":
            return
        for r in range(1, 7):
            assert kraft_audit(C, r).holds


class TestIl:
    def test_identity_verified(self):
        assert check_il(identity_fsc(2), use_certificate=False).status == "verified"

    def test_epsilon_collision(self):
        v = check_il(epsilon_fsc(2))
        assert v.status == "collision"
        assert (v.u, v.w, v.output, v.state) == ((0,), (0, 0), "", 0)
        assert replay_witness(epsilon_fsc(2), v)

    def test_non_prefix_free(self):
        bad = huffman_ilfsc(HuffmanCodebook(1, 2, {0: "0", 1: "00"}, {}), 2)
        v = check_il(bad)
        assert v.status == "collision" and replay_witness(bad, v)
        assert brute_force_oracle("il-collision", (bad, 3)) == ((0, 0, 0), (0, 1))

    @pytest.mark.parametrize("ell", [1, 2])
    def test_huffman_cross_checked(self, ell):
        C = build_for_string(S("0001000100100111"), ell)
        assert C.certificate == CERT_PREFIX_CODE
        assert check_il(C, use_certificate=False).status == "verified"
        assert brute_force_oracle("il-collision", (C, 3 * ell)) is None

    @settings(max_examples=150)
    @given(machines(m=2, max_states=3, max_out=2))
    def test_agrees_with_exhaustive_search(self, C):
        v = check_il(C)
        found = brute_force_oracle("il-collision", (C, 7))
        if v.status == "collision":
            assert replay_witness(C, v)
        if found is not None:
            assert v.status != "verified"
            a, b = found
            assert run(C, S("".join(map(str, a)))) == run(C, S("".join(map(str, b))))
        if v.status == "verified":
            assert found is None


class TestSwapAndFormat:
    def test_symmetric_fixed_point(self):
        C = identity_fsc(4)
        sym = Fsc(C.delta, ((C.outputs[0][0], "1", "1", C.outputs[0][3]),))
        assert relabel_swap(sym) == sym

    @given(machines(m=4))
    def test_involution(self, C):
        assert relabel_swap(relabel_swap(C)) == C

    def test_swaps_outputs(self):
        rng = np.random.default_rng(5)
        C = Fsc(np.array([[0, 1, 0, 1], [1, 0, 1, 0]]), (("0", "10", "110", ""), ("1", "", "01", "11")))
        D = relabel_swap(C)
        for _ in range(100):
            n = int(rng.integers(1, 20))
            u = S("".join(map(str, rng.integers(0, 2, n))))
            w = S("".join(map(str, rng.integers(0, 2, n))))
            assert run(C, pair(u, w)) == run(D, pair(w, u))

    def test_not_product(self):
        with pytest.raises(NotProductAlphabet):
            relabel_swap(identity_fsc(3))

    def test_json_roundtrip(self):
        C = build_for_string(S("00011011"), 2)
        back = Fsc.from_json(C.to_json())
        assert back == C and back.certificate == C.certificate

    def test_json_errors(self):
        d = identity_fsc(2).to_dict()
        d["transitions"] = d["transitions"][:1]
        with pytest.raises(MachineFormatError):
            Fsc.from_dict(d)
        with pytest.raises(MachineFormatError):
            Fsc.from_json("{not json")
        with pytest.raises(InvalidArgument):
            Fsc(np.array([[0]]), (("2",),))

    def test_kraft_rhs(self):
        assert kraft_rhs(1, 2, 3) == pytest.approx(1 + np.log2(9))
