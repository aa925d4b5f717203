import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import S, strings
from fsmdim.alphabet import gen_champernowne, prefix_truncate
from fsmdim.blockstats import FrequencyTable, block_freq_table, shannon_entropy
from fsmdim.errors import BlockTooLarge, EmptySupport
from fsmdim.fsc import identity_fsc, output_length, run
from fsmdim.huffman import (
    HuffmanCodebook, build_codebook, build_for_string, canonical_codewords, codebook_for_string,
    decode_string, huffman_ilfsc, huffman_lengths, tree_state_count,
)
from fsmdim.ratios import rho_c
from fsmdim.verify import brute_force_oracle


class TestCodebook:
    def test_dyadic_lengths(self):
        assert huffman_lengths({0: 2, 1: 1, 2: 1}) == {0: 1, 1: 2, 2: 2}

    def test_single_block(self):
        book = build_codebook(FrequencyTable(1, 2, {1: 5}, 5))
        assert book.codeword(1) == "0"
        assert huffman_lengths({7: 3}) == {7: 1}

    def test_uniform_four(self):
        book = build_codebook(block_freq_table(S("00011011"), 2))
        assert set(book.lengths().values()) == {2}

    def test_canonical_order(self):
        assert canonical_codewords({0: 1, 1: 2, 2: 2}) == {0: "0", 1: "10", 2: "11"}

    def test_empty(self):
        with pytest.raises(EmptySupport):
            huffman_lengths({})

    def test_too_large(self):
        with pytest.raises(BlockTooLarge):
            build_for_string(S("0" * 40), 17)

    def test_optimal_matches_oracle(self):
        book = build_codebook(FrequencyTable(1, 3, {0: 2, 1: 1, 2: 1}, 4))
        oracle = brute_force_oracle("huffman-optimal", [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
        assert oracle["expected_length"] == Fraction(3, 2) == book.expected_length()

    @given(st.lists(st.integers(1, 50), min_size=1, max_size=8))
    def test_huffman_is_optimal(self, weights):
        lengths = huffman_lengths(dict(enumerate(weights)))
        cost = Fraction(sum(w * lengths[i] for i, w in enumerate(weights)), sum(weights))
        assert cost == brute_force_oracle("huffman-optimal", weights)["expected_length"]

    @given(strings(min_len=2, max_len=60, multiple_of=2))
    def test_prefix_free_complete_within_one_bit(self, u):
        t = block_freq_table(u, 2)
        book = build_codebook(t)
        assert book.is_prefix_free() and book.is_complete() and book.certifiable()
        assert sum(Fraction(1, 2 ** n) for n in book.lengths().values()) == 1
        assert float(book.expected_length()) <= shannon_entropy(t) + 1 + 1e-12

    def test_csv(self):
        book = codebook_for_string(S("001011"), 2)
        rows = book.to_csv().splitlines()
        assert rows[0] == "block,codeword,count" and len(rows) == 5


class TestMachine:
    def test_identity_book(self):
        C = huffman_ilfsc(HuffmanCodebook(1, 2, {0: "0", 1: "1"}, {}), 2)
        assert C.n_states == 1 and C.outputs == identity_fsc(2).outputs

    def test_partial_book(self):
        C = huffman_ilfsc(HuffmanCodebook(2, 2, {0: "0"}, {}), 2)
        assert output_length(C, S("0" * 64)) == 32
        assert C.certificate is None

    def test_run_length_is_sum_of_codewords(self):
        u = S("001011")
        book = codebook_for_string(u, 2)
        C = huffman_ilfsc(book, 2)
        assert len(run(C, u)) == sum(len(book.codeword(x)) for x in ("00", "10", "11"))
        assert decode_string(book, run(C, u)) == u

    def test_ratios(self):
        assert rho_c(build_for_string(S("01" * 50), 2), S("01" * 50)) == 0.5
        assert rho_c(build_for_string(S("0" * 64), 2), S("0" * 64)) == 0.5

    def test_champernowne_bound(self):
        u = gen_champernowne(2, 4096)
        C = build_for_string(u, 3)
        h = shannon_entropy(block_freq_table(prefix_truncate(u, 3), 3))
        assert rho_c(C, u) <= h / 3 + 1 / 3

    def test_state_count(self):
        assert tree_state_count(2, 3) == 7 and tree_state_count(3, 2) == 4
        assert build_for_string(S("012012", 3), 2).n_states == 4

    @given(strings(min_len=3, max_len=90, multiple_of=3), st.integers(1, 3))
    def test_huff_bound(self, u, ell):
        if len(u) % ell:
            return
        C = build_for_string(u, ell)
        lk = math.log2(u.k)
        assert rho_c(C, u) <= shannon_entropy(block_freq_table(u, ell)) / (ell * lk) + 1 / ell + 1e-12
        book = codebook_for_string(u, ell)
        assert decode_string(book, run(C, u)) == u
