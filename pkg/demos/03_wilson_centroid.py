"""Search the cluster width on a discrete instance with the plateau method."""

from runoff_agenda import RngSpec, wilson_centroid_optimize

res = wilson_centroid_optimize(30, 51, scan_trials=10_000, validation_trials=50_000,
                               rng=RngSpec(5), universal=True)
for l, est in res.scan.items():
    bar = "#" * int(40 * est.p_hat)
    mark = " <- plateau" if res.l_left <= l <= res.l_right else ""
    print(f"l={l:2d}  {est.p_hat:.4f}  {bar}{mark}")
v = res.p_validated
print(f"l_opt={res.l_opt}  validated p={v.p_hat:.4f}  [{v.wilson_lower:.4f}, {v.wilson_upper:.4f}]")
