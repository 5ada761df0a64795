"""
Where least squares goes wrong: data-distribution bias
======================================================

Least squares weights every sample equally, so clustered data drag the
model toward the cluster.  The encoder weights samples by their mesh
volume instead, which neutralizes density.  This demo fits both on a
lopsided Gaussian cloud and maps the one-step SSE over the dynamic
range; the heatmaps land in sse_edmd.csv / sse_dde.csv.
"""

import numpy as np

from kdde import (
    DatasetSpec,
    PendulumParams,
    eval_domain_for,
    fit_dde,
    fit_edmd,
    generate,
    rbf_grid_for_data,
    sse_grid,
)
from kdde.fileio import save_report

params = PendulumParams()

# Samples pile up at the top edge of the range (center [0, 2]).
data = generate(
    DatasetSpec(kind="gaussian", size=5000, center=(0.0, 2.0), seed=0), params
)
d = rbf_grid_for_data(data.x, (5, 5))
domain = eval_domain_for(data)

reports = {}
for name, model in (("edmd", fit_edmd(data, d)), ("dde", fit_dde(data, d))):
    report = sse_grid(model, params, domain, (100, 100))
    reports[name] = report
    print(f"{name:>5}: total SSE {report.total_sse:8.3f}   "
          f"per-cell variance {report.sse_variance:.2e}")
    save_report(report, f"sse_{name}.csv")

print("\nThe equal-weight fit is accurate near the cluster but degrades in")
print("the sparsely sampled lower half; the volume-weighted fit spreads")
print("its error evenly. Compare the exported heatmaps:")
print("  sse_edmd.csv / sse_dde.csv (+ .json sidecars)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
    vmax = max(np.nanmax(r.sse) for r in reports.values())
    for ax, (name, report) in zip(axes, reports.items()):
        im = ax.imshow(
            report.sse.T,
            origin="lower",
            extent=domain.bbox.ravel(),
            aspect="auto",
            vmin=0,
            vmax=vmax,
        )
        ax.set_title(f"{name}: total {report.total_sse:.1f}")
        ax.set_xlabel("theta")
    axes[0].set_ylabel("theta_dot")
    fig.colorbar(im, ax=axes, label="one-step SSE")
    fig.savefig("sse_heatmaps.png", dpi=120)
    print("wrote sse_heatmaps.png")
except ImportError:
    print("(matplotlib not installed; skipping the heatmap figure)")
