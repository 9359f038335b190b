"""Watch support recovery sharpen as the sample grows.

Each trial plants a p_star-feature signal, fits l0 sparse k-means with s
fixed at the true p_star, and records two events: the per-feature BCSS
of every signal feature clearing every noise feature (the gap event),
and the selected set matching the planted support exactly. Frequencies
over 30 trials per n, with Wilson 95% intervals.
"""
import numpy as np

from sparsekm import MixtureSpec, sweep

p, p_star = 100, 10
means = np.vstack([np.full(p_star, 0.9), np.full(p_star, -0.9)])
base = MixtureSpec(k=2, sizes=(10, 10), p=p, p_star=p_star, means=means,
                   seed=3)

report = sweep(base, n_list=[20, 40, 80, 160], trials=30)

print(f"p={p}, p_star={p_star}, 30 trials per row\n")
print(f"{'n':>4}  {'freq_gap':>8}  {'95% interval':>16}  "
      f"{'freq_support':>12}  {'mean_ecr':>8}")
for row in report.rows:
    ci = f"[{row.gap_lo:.2f}, {row.gap_hi:.2f}]"
    print(f"{row.n:>4}  {row.freq_gap:8.2f}  {ci:>16}  "
          f"{row.freq_support:12.2f}  {row.mean_ecr:8.3f}")

print("\nthe frequencies climb toward 1 and the error rate falls; at small")
print("n the same support is simply not identifiable from the data.")
