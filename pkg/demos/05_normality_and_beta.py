"""Normality tests, beta-dimension and self-information rates.

Run with ``python demos/05_normality_and_beta.py``.
"""
# %%
from fsmdim import ProbMeasure, estimate_beta_dim, gen_iid, normality_test, pair
from fsmdim.dimension import divergence_prediction, self_information_rate

alpha = ProbMeasure.parse("3/4,1/4")
beta = ProbMeasure.parse("1/2,1/2")
n = 1 << 16
s = gen_iid(alpha, n, seed=11)

# %% Block frequencies against the product measure alpha^l
for row in normality_test(s, alpha, ell_max=4)["per_ell"]:
    print(f"l={row['ell']}: max deviation {row['max_deviation']:.4f}, KL {row['kl_divergence']:.2e}")

# %% l_beta(S|n)/n approaches H(alpha) + D(alpha||beta)
for b in (alpha, beta, ProbMeasure.parse("1/4,3/4")):
    print(f"beta={[float(x) for x in b.weights]}: rate {self_information_rate(s, b):.4f}, "
          f"predicted {divergence_prediction(alpha, b):.4f}")

# %% Product measure on a pair of independent sequences
t = gen_iid(beta, n, seed=12)
print("pair rate:", round(self_information_rate(pair(s, t), alpha.product(beta)), 4))

# %% Catalog beta-dimension: compressed bits over l_beta
est = estimate_beta_dim(s, alpha, r=16)
print(f"dim^alpha in [{est.lower:.4f}, {est.upper:.4f}]")
