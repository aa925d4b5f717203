"""Huffman block compressors as lossless finite-state machines.

Run with ``python demos/02_huffman_compressors.py``.
"""
# %%
import math

from fsmdim import (
    ProbMeasure, block_freq_table, build_codebook, build_for_string, check_il, gen_iid,
    kraft_audit, output_length, shannon_entropy,
)
from fsmdim.huffman import decode_string

u = gen_iid(ProbMeasure.parse("0.7,0.2,0.1"), 3 * 2000, seed=3)
ell = 2

# %% Canonical codebook for the l-blocks of u
book = build_codebook(block_freq_table(u, ell))
for code, word in sorted(book.entries.items(), key=lambda kv: (len(kv[1]), kv[1])):
    print(f"block {code}: {word}")
print("prefix-free:", book.is_prefix_free(), " expected length:", float(book.expected_length()))

# %% The same code as a tree-walking compressor
C = build_for_string(u, ell)
bits = output_length(C, u)
rho = bits / (len(u) * math.log2(3))
bound = shannon_entropy(block_freq_table(u, ell)) / (ell * math.log2(3)) + 1 / ell
print(f"states={C.n_states} ratio={rho:.4f} <= entropy bound {bound:.4f}")

# %% Decoding the output recovers the input
from fsmdim import run

assert decode_string(book, run(C, u)) == u
print("round trip ok")

# %% Lossless check and Kraft sums over r-symbol inputs
print("IL verdict:", check_il(C).status)
for r in (1, 2, 4):
    rep = kraft_audit(C, r)
    print(f"r={r}: sum 2^-L = {float(rep.lhs):.4f} <= {rep.rhs:.4f}")
