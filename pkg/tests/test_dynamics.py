"""Wall-pendulum map and dataset generators."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.spatial import Delaunay

from kdde.dynamics import (
    DatasetSpec,
    PendulumParams,
    generate,
    pendulum_accel,
    pendulum_energy,
    pendulum_step,
    pendulum_step_batch,
)
from kdde.errors import DatasetSpecError


class TestPendulumStep:
    def test_equilibrium_fixed_point(self):
        np.testing.assert_array_equal(
            pendulum_step(PendulumParams(), [0.0, 0.0]), [0.0, 0.0]
        )

    def test_acceleration_against_wall(self):
        # wall engaged at theta = 0.8: gravity + wall spring, no damping
        a = pendulum_accel(PendulumParams(), 0.8, 0.0)
        expected = -math.sin(0.8) - 200.0 * (0.8 - math.pi / 4) ** 2
        assert a == pytest.approx(expected, abs=1e-12)
        assert a == pytest.approx(-0.7600, abs=2e-4)

    def test_acceleration_inside_walls(self):
        # no wall contact at theta = 0.5; quadratic damping at unit rate
        a = pendulum_accel(PendulumParams(), 0.5, 1.0)
        assert a == pytest.approx(-math.sin(0.5) - 1.0, abs=1e-12)
        assert a == pytest.approx(-1.4794, abs=5e-5)

    def test_step_matches_adaptive_integrator(self):
        params = PendulumParams()

        def rhs(_, y):
            return [y[1], float(pendulum_accel(params, y[0], y[1]))]

        def reference(x):
            ref = solve_ivp(
                rhs, (0.0, params.dt), x, rtol=1e-12, atol=1e-12, max_step=0.01
            )
            return ref.y[:, -1]

        # away from the wall kink and the damping sign switch the field is
        # smooth and classical RK4 accuracy applies
        np.testing.assert_allclose(
            pendulum_step(params, [0.5, 1.0]), reference([0.5, 1.0]), atol=1e-8
        )
        rng = np.random.default_rng(17)
        smooth = np.stack(
            [rng.uniform(-0.3, 0.3, 30), rng.uniform(0.8, 1.5, 30)], axis=1
        )
        for x in smooth:
            np.testing.assert_allclose(pendulum_step(params, x), reference(x), atol=1e-8)

        # arbitrary states may cross the C1 switching surfaces inside the
        # step, where the fixed-step integrator loses formal order
        anywhere = rng.uniform([-0.8, -2.0], [0.8, 2.0], size=(20, 2))
        for x in anywhere:
            np.testing.assert_allclose(pendulum_step(params, x), reference(x), atol=1e-5)

    def test_energy_dissipates_without_wall_contact(self):
        params = PendulumParams()
        rng = np.random.default_rng(23)
        theta = rng.uniform(-math.pi / 4, math.pi / 4, size=1000)
        omega = rng.uniform(0.05, 2.0, size=1000) * rng.choice([-1, 1], size=1000)
        X = np.stack([theta, omega], axis=1)

        # track wall contact through the substep trajectory
        fine = PendulumParams(dt=params.dt / params.substeps, substeps=1)
        touched = np.zeros(len(X), dtype=bool)
        state = X.copy()
        for _ in range(params.substeps):
            state = pendulum_step_batch(fine, state)
            touched |= np.abs(state[:, 0]) >= params.wall_angle
        free = ~touched

        e0 = pendulum_energy(X[free])
        e1 = pendulum_energy(state[free])
        assert free.sum() > 600
        assert np.all(e1 < e0)

    def test_odd_symmetry(self):
        params = PendulumParams()
        rng = np.random.default_rng(29)
        X = rng.uniform([-0.8, -2.0], [0.8, 2.0], size=(500, 2))
        forward = pendulum_step_batch(params, X)
        mirrored = pendulum_step_batch(params, -X)
        np.testing.assert_allclose(mirrored, -forward, atol=1e-12)

    def test_batch_matches_single(self):
        params = PendulumParams()
        rng = np.random.default_rng(31)
        X = rng.uniform([-0.8, -2.0], [0.8, 2.0], size=(10, 2))
        batch = pendulum_step_batch(params, X)
        for i, x in enumerate(X):
            np.testing.assert_array_equal(batch[i], pendulum_step(params, x))


class TestGenerate:
    def test_uniform_count_and_grid(self):
        data = generate(DatasetSpec(kind="uniform", size=900), PendulumParams())
        assert len(data) == 900
        thetas = np.unique(data.x[:, 0])
        assert len(thetas) == 30
        assert thetas[0] == -0.8 and thetas[-1] == 0.8

    def test_gaussian_border_plus_interior(self):
        spec = DatasetSpec(kind="gaussian", size=1000, center=(0.0, 2.0), seed=3)
        data = generate(spec, PendulumParams())
        assert len(data) == 1000
        lo, hi = spec.bounds[:, 0], spec.bounds[:, 1]
        assert np.all((data.x >= lo) & (data.x <= hi))
        on_border = (
            np.isclose(data.x[:, 0], lo[0])
            | np.isclose(data.x[:, 0], hi[0])
            | np.isclose(data.x[:, 1], lo[1])
            | np.isclose(data.x[:, 1], hi[1])
        )
        assert on_border.sum() == 100
        # all four corners present so the hull equals the rectangle
        for corner in ([lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]):
            assert np.any(np.all(np.isclose(data.x, corner), axis=1))

    def test_trajectories_shape(self):
        data = generate(DatasetSpec(kind="traj", size=1000, seed=1), PendulumParams())
        assert len(data) == 1000
        assert data.provenance["n_trajectories"] == 100
        assert data.provenance["steps_per_trajectory"] == 10
        # consecutive rows chain within a trajectory
        np.testing.assert_array_equal(data.x[1], data.x_next[0])
        np.testing.assert_array_equal(data.x[11], data.x_next[10])

    def test_determinism(self):
        spec = DatasetSpec(kind="gaussian", size=500, center=(0.8, 0.0), seed=11)
        a = generate(spec, PendulumParams())
        b = generate(spec, PendulumParams())
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.x_next, b.x_next)

    def test_trajectory_closure(self):
        data = generate(DatasetSpec(kind="traj", size=1000, seed=2), PendulumParams())
        hull = Delaunay(data.x)
        outside = np.count_nonzero(hull.find_simplex(data.x_next) < 0)
        assert outside / len(data) < 0.05

    def test_spec_validation(self):
        with pytest.raises(DatasetSpecError):
            DatasetSpec(kind="gaussian", size=50, border_count=100)
        with pytest.raises(DatasetSpecError):
            DatasetSpec(kind="gaussian", size=1000, center=(5.0, 0.0))
        with pytest.raises(DatasetSpecError):
            DatasetSpec(kind="nope", size=100)
        with pytest.raises(DatasetSpecError):
            DatasetSpec(kind="traj", size=50, n_trajectories=100)

    def test_non_square_size_rounds_down(self):
        with pytest.warns(UserWarning, match="not a square"):
            data = generate(DatasetSpec(kind="uniform", size=1000), PendulumParams())
        assert len(data) == 961
        assert data.provenance["actual_size"] == 961
