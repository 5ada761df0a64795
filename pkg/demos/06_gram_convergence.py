"""
Inner-product entries converge as data accumulate
=================================================

Each entry of the Gram matrices is a Riemann-style weighted sum, so
growing the trajectory dataset should make individual entries settle.
This traces a state entry and three bump entries across dataset sizes
and writes the trace CSV the CLI `convergence` command also produces.
"""

import numpy as np

from kdde import DatasetSpec, PendulumParams, generate, q_convergence, rbf_grid_for_data

params = PendulumParams()
sizes = [1000, 2500, 5000, 10000, 25000]

# Fix the dictionary once (from the largest dataset's span) so the same
# functions are integrated at every size.
spec = DatasetSpec(kind="traj", size=max(sizes), seed=0)
largest = generate(spec, params)
d = rbf_grid_for_data(largest.x, (5, 5))

# One state entry plus three bumps at increasing distance from rest.
centers = d.params["centers"]
ranked = np.argsort(np.linalg.norm(centers, axis=1))
picks = [ranked[0], ranked[len(ranked) // 2], ranked[-1]]
selectors = [(0, 0)] + [(2 + int(i), 2 + int(i)) for i in picks]

trace = q_convergence(sizes, spec, d, selectors, params)

print(f"{'N':>7}  " + "  ".join(f"Q[{i},{j}]" for i, j in trace.selectors))
for row, n in enumerate(trace.sizes):
    print(f"{n:>7}  " + "  ".join(f"{v: .5f}" for v in trace.q_entries[row]))

last = np.abs(trace.q_entries[-1] - trace.q_entries[-2]) / np.abs(trace.q_entries[-2])
print("\nrelative change over the last refinement:",
      ", ".join(f"{v:.4%}" for v in last))

with open("q_trace.csv", "w") as fh:
    fh.write("N,entry_id,value\n")
    for n, entry, value in trace.rows():
        fh.write(f"{n},{entry},{value:.17g}\n")
print("wrote q_trace.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for col, (i, j) in enumerate(trace.selectors):
        ax.plot(trace.sizes, trace.q_entries[:, col], "o-", label=f"Q[{i},{j}]")
    ax.set_xscale("log")
    ax.set_xlabel("dataset size")
    ax.set_ylabel("entry value")
    ax.legend()
    fig.tight_layout()
    fig.savefig("q_trace.png", dpi=120)
    print("wrote q_trace.png")
except ImportError:
    print("(matplotlib not installed; skipping the trace plot)")
