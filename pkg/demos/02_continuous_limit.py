"""Optimal continuous width, its failure probability, and the decay law."""

import math

from runoff_agenda import PrecisionConfig, decay_table, fit_decay_slope, optimize_eta_win

for m in (11, 31, 51):
    opt = optimize_eta_win(m)
    print(f"m={m:3d}  eta*={opt.eta:.6f}  p={opt.p:.6f}  q={opt.q:.3e}")

# the same search in 80-digit arithmetic
ext = PrecisionConfig.extended(80)
for m in (151, 251):
    opt = optimize_eta_win(m, precision=ext)
    print(f"m={m:3d}  eta*={opt.eta:.6f}  q={float(opt.q):.4e}")

rows = decay_table(range(31, 70, 2))
slope = fit_decay_slope(rows)
print(f"log10 q falls by {slope:.4f} per voter; log10(4/5) = {math.log10(0.8):.4f}")
