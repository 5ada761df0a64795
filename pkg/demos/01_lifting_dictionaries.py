"""
Observable dictionaries and state lifting
=========================================

A dictionary turns a raw 2-state sample into a longer vector of
observable values.  The linear models fitted elsewhere act on these
lifted vectors, and read predicted states back out of the fixed state
block at the front.
"""

import numpy as np

from kdde import load_mlp_dictionary, make_rbf_grid, state_dictionary
from kdde.dictionary import MlpWeights

# The trivial dictionary: z(x) = x.
d = state_dictionary(2)
print("state-only:", d.lift([0.3, -1.2]))

# The benchmark dictionary: 2 state variables followed by a 5x5 grid of
# Gaussian bumps spanning the pendulum's dynamic range -> 27 observables.
bounds = [[-0.8, 0.8], [-2.0, 2.0]]
d = make_rbf_grid([5, 5], bounds)
z = d.lift([0.1, 0.4])
print("rbf grid: m =", d.output_dim)
print("  state block:", z[:2])
print("  strongest bump:", z[2:].max(), "weakest:", z[2:].min())

# Kernel width follows center spacing: a denser grid means sharper bumps.
for shape in ([5, 5], [7, 7], [9, 9]):
    dd = make_rbf_grid(shape, bounds)
    print(f"  grid {shape}: m = {dd.output_dim:>2}, width = {dd.params['width']:.3f}")

# Dictionaries can also come from a trained network: the hidden stack of
# an exported model becomes the observable set, state block in front.
rng = np.random.default_rng(0)
weights = MlpWeights(
    (
        (rng.standard_normal((16, 2)), rng.standard_normal(16), "relu"),
        (rng.standard_normal((40, 16)), rng.standard_normal(40), "relu"),
    ),
    input_dim=2,
    output_dim=40,
)
d = load_mlp_dictionary(weights, include_state=True)
print("mlp dictionary: m =", d.output_dim)
print("  state pass-through intact:", np.array_equal(d.lift([0.2, -0.5])[:2], [0.2, -0.5]))
