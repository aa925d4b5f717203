"""Block entropy rates and finite-state dimension estimates.

Run with ``python demos/01_block_entropy_dimension.py``.
"""
# %% Three kinds of binary sequence
from fsmdim import (
    ProbMeasure, block_freq_table, estimate_dim, gen_champernowne, gen_iid, gen_periodic,
    shannon_entropy,
)

n = 1 << 16
champ = gen_champernowne(2, n)
skew = gen_iid(ProbMeasure.parse("3/4,1/4"), n, seed=7)
periodic = gen_periodic([0, 1, 1], n, 2)
print("first 40 digits of the Champernowne prefix:", champ[:40].to_text())

# %% Aligned block frequencies at l = 2
table = block_freq_table(champ[: n // 2 * 2], 2)
for code, count in table.items():
    print(f"block {code:02b}: {count}")
print("H(pi^(2)) =", round(shannon_entropy(table), 6), "bits per block")

# %% Dimension estimates: lower/upper tail statistics of H_l(u|n) / (l log k)
for name, u in [("champernowne", champ), ("iid 3/4,1/4", skew), ("periodic 011", periodic)]:
    est = estimate_dim(u, ell_max=4)
    rows = ", ".join(f"l={p['ell']}: {p['tail_lower']:.4f}" for p in est.per_ell)
    print(f"{name:14s} dim in [{est.lower:.4f}, {est.upper:.4f}] (l*={est.ell_star}); {rows}")

# %% The iid estimate should sit near H(3/4, 1/4)
print("H(3/4,1/4) =", round(shannon_entropy(ProbMeasure.parse("3/4,1/4")), 6))
