"""Mutual dimension: block mutual-information rates and compression-based ratios.

Run with ``python demos/03_mutual_dimension.py``.
"""
# %%
import numpy as np

from fsmdim import ProbMeasure, SymbolString, estimate_mdim, gen_iid, mutual_ratio

n = 1 << 15
u = gen_iid(ProbMeasure.uniform(2), n, seed=1)
independent = gen_iid(ProbMeasure.uniform(2), n, seed=2)
rng = np.random.default_rng(5)
keep = rng.random(n) < 0.8
noisy = SymbolString(u.alphabet, np.where(keep, u.data, rng.integers(0, 2, n)))

# %% Block mutual-information rate brackets
for name, w in [("itself", u), ("noisy copy", noisy), ("independent", independent)]:
    est = estimate_mdim(u, w, ell_max=3, cross_check=False)
    print(f"{name:12s} mdim in [{est.lower:.4f}, {est.upper:.4f}]")

# %% Compression-based counterpart rho_t(u) + rho_t(w) - rho_r(u, w)
for name, w in [("itself", u), ("noisy copy", noisy), ("independent", independent)]:
    rep = mutual_ratio(u, w, r=16, t=16)
    print(f"{name:12s} rho_16,16 = {rep.value:+.4f} (symmetric: {rep.swapped_value:+.4f})")
