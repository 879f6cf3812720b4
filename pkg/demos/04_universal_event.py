"""Universal victory: one electorate, every candidate a winner in turn."""

import numpy as np

from runoff_agenda import (
    UniformSample,
    estimate_p2_continuous,
    optimize_eta_universal,
    universal_event_continuous,
)

spread = UniformSample.from_points(np.arange(7) / 7)
crowded = UniformSample.from_points([0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.5])
print("equally spaced, eta=0.3:", universal_event_continuous(spread, 0.3))
print("crowded, eta=0.2:", universal_event_continuous(crowded, 0.2))

for m, eta in ((31, 0.2518), (41, 0.2408)):
    est = estimate_p2_continuous(m, eta, 100_000, master_seed=1)
    print(f"m={m} eta={eta}: {est.p_hat:.4f} [{est.wilson_lower:.4f}, {est.wilson_upper:.4f}]")

opt = optimize_eta_universal(21, trials=50_000, master_seed=2)
print(f"m=21 best eta={opt.eta:.4f}  validated {opt.estimate.p_hat:.4f}")
