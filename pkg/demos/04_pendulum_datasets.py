"""
The wall-pendulum benchmark and its dataset families
====================================================

A pendulum with quadratic damping bounces between stiff walls at
+/- pi/4.  Three samplers probe its one-step map: an even grid, a
truncated Gaussian cloud with a uniform border, and forward-simulated
trajectories that pile up near the equilibrium.  Saved as PNG when
matplotlib is available.
"""

import numpy as np

from kdde import DatasetSpec, PendulumParams, generate, pendulum_energy, pendulum_step

params = PendulumParams()
print(f"map step dt = {params.dt}s via {params.substeps} RK4 substeps")

# A single bounce: start touching the right wall, watch energy drain.
x = np.array([0.8, 0.0])
print("\ntrajectory from the wall:")
for t in range(8):
    print(f"  t={t * params.dt:.1f}s  theta={x[0]:+.3f}  omega={x[1]:+.3f}  "
          f"E={pendulum_energy(x):.4f}")
    x = pendulum_step(params, x)

# The three dataset families at a glance.
flavors = [
    DatasetSpec(kind="uniform", size=900),
    DatasetSpec(kind="gaussian", size=900, center=(0.0, 2.0), seed=1),
    DatasetSpec(kind="traj", size=900, seed=1),
]
datasets = []
for spec in flavors:
    data = generate(spec, params)
    datasets.append(data)
    hull_span = data.x.max(0) - data.x.min(0)
    print(f"\n{spec.kind}: {len(data)} pairs, span theta {hull_span[0]:.2f}, "
          f"omega {hull_span[1]:.2f}")
    print(f"  first pair: {data.x[0]} -> {data.x_next[0]}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(13, 4), sharex=True, sharey=True)
    for ax, spec, data in zip(axes, flavors, datasets):
        ax.plot(data.x[:, 0], data.x[:, 1], ".", ms=2)
        ax.set_title(spec.kind)
        ax.set_xlabel("theta")
    axes[0].set_ylabel("theta_dot")
    fig.tight_layout()
    fig.savefig("datasets.png", dpi=120)
    print("\nwrote datasets.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the scatter plot)")
