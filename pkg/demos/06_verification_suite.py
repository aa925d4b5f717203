"""Running the seeded inequality checks from Python.

Run with ``python demos/06_verification_suite.py``.
"""
# %%
from fsmdim import brute_force_oracle, run_suite

report = run_suite(["shac", "pmi", "huff", "kraft", "mcr"], trials=10, seed=0)
for c in report["checks"]:
    print(f"{'PASS' if c['passed'] else 'FAIL'} {c['check']:14s} {c['assertions']:6d} assertions")
print("all passed:", report["passed"])

# %% Oracles used by the checks are available directly
print("H(3/4,1/4) =", brute_force_oracle("entropy", [3, 1]))
print("optimal code:", brute_force_oracle("huffman-optimal", [5, 2, 2, 1]))
