"""
Occupation of views in the Leibnizian ensemble
==============================================

Each string is weighted by exp(-beta gamma V); a view is occupied at most once
per string, which gives fermion-like statistics.
"""
import numpy as np

from leibniz_multiway.stats import (
    ensemble_report,
    entropy_variety_scan,
    fermi_dirac,
    idealized_fd_oracle,
    random_leibnizian,
)

for n in range(8, 12):
    rep = ensemble_report("AB", n)
    print(f"N={n} size={rep.size} mu={rep.mu:.4f} sum={rep.total_occupation:.12f} "
          f"max|n - FD|={rep.max_abs_dev:.3f}")

# exactly solvable free fermions approach the FD curve as levels are added
for m in (10, 20, 40, 80):
    e = np.linspace(0.1, 1.0, m)
    occ, mu = idealized_fd_oracle(e, m // 2)
    print(m, f"{np.max(np.abs(occ - fermi_dirac(e, 1.0, mu))):.4f}")

# entropy and variety of random Leibnizian strings go together
words = random_leibnizian("AB", range(8, 21), 200, seed=0)
print("pearson r =", round(entropy_variety_scan(words).r, 4))
