"""Deciding whether a finite-state compressor is information lossless.

Run with ``python demos/04_lossless_checker.py``.
"""
# %%
from fsmdim import HuffmanCodebook, check_il, epsilon_fsc, huffman_ilfsc, identity_fsc
from fsmdim.fsc import replay_witness, run, final_state

# %% The identity machine is lossless
print("identity:", check_il(identity_fsc(2)).status)

# %% A machine that writes nothing maps every input to the same pair
eps = epsilon_fsc(2)
v = check_il(eps)
print("epsilon:", v.to_dict())

# %% A codebook whose words are not prefix-free: "0" and "00"
bad = huffman_ilfsc(HuffmanCodebook(1, 2, {0: "0", 1: "00"}, {}), 2)
v = check_il(bad)
print("non-prefix-free:", v.to_dict())
print("replay:", run(bad, v.u), final_state(bad, v.u), "==", run(bad, v.w), final_state(bad, v.w),
      "->", replay_witness(bad, v))
