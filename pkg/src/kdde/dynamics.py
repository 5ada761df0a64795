"""Benchmark system: a damped pendulum bouncing between compliant walls.

State x = [theta, theta_dot].  The continuous dynamics are

    theta_ddot = -sin(theta) + F_k + F_c
    F_k = -sign(theta) * k * (|theta| - wall_angle)^2   when |theta| >= wall_angle
    F_c = -sign(theta_dot) * c * theta_dot^2

with stiff walls (k = 200) at +/- pi/4 and quadratic damping (c = 1).
The discrete-time map integrates this with fixed-step RK4.  Three dataset
generators sample the map: a uniform grid, a truncated Gaussian cloud
with a uniform border, and forward-simulated trajectories.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .encoder import TransitionDataset
from .errors import DatasetSpecError, NonFiniteInput

DEFAULT_BOUNDS = np.array([[-0.8, 0.8], [-2.0, 2.0]])


@dataclass(frozen=True)
class PendulumParams:
    """Physical and integration parameters of the wall pendulum map.

    The default map step advances 0.2 s through 20 RK4 substeps of
    0.01 s; 0.2 s of motion per sample keeps one-step displacements large
    enough that model differences are visible over the dynamic range.
    """

    wall_stiffness: float = 200.0
    damping: float = 1.0
    wall_angle: float = math.pi / 4
    dt: float = 0.2
    substeps: int = 20

    def __post_init__(self):
        if self.wall_stiffness <= 0 or self.damping < 0:
            raise DatasetSpecError("need wall_stiffness > 0 and damping >= 0")
        if self.dt <= 0 or self.substeps < 1 or self.wall_angle <= 0:
            raise DatasetSpecError("need dt > 0, substeps >= 1, wall_angle > 0")

    def as_dict(self) -> dict:
        return {
            "wall_stiffness": self.wall_stiffness,
            "damping": self.damping,
            "wall_angle": self.wall_angle,
            "dt": self.dt,
            "substeps": self.substeps,
        }


def pendulum_accel(params: PendulumParams, theta, theta_dot):
    """Angular acceleration; vectorized over arrays."""
    theta = np.asarray(theta, dtype=float)
    theta_dot = np.asarray(theta_dot, dtype=float)
    depth = np.abs(theta) - params.wall_angle
    f_wall = np.where(
        depth >= 0.0, -np.sign(theta) * params.wall_stiffness * depth**2, 0.0
    )
    f_damp = -np.sign(theta_dot) * params.damping * theta_dot**2
    return -np.sin(theta) + f_wall + f_damp


def _deriv(params: PendulumParams, state: np.ndarray) -> np.ndarray:
    th, om = state[..., 0], state[..., 1]
    return np.stack([om, pendulum_accel(params, th, om)], axis=-1)


def pendulum_step_batch(params: PendulumParams, X) -> np.ndarray:
    """One map application for a (K, 2) batch: RK4 over dt in substeps."""
    state = np.asarray(X, dtype=float).copy()
    if not np.all(np.isfinite(state)):
        raise NonFiniteInput("pendulum state contains NaN or Inf")
    h = params.dt / params.substeps
    for _ in range(params.substeps):
        k1 = _deriv(params, state)
        k2 = _deriv(params, state + 0.5 * h * k1)
        k3 = _deriv(params, state + 0.5 * h * k2)
        k4 = _deriv(params, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state


def pendulum_step(params: PendulumParams, x) -> np.ndarray:
    """One discrete-time map application for a single state [theta, omega]."""
    x = np.asarray(x, dtype=float)
    return pendulum_step_batch(params, x[None, :])[0]


def pendulum_map(params: PendulumParams):
    """The map as a vectorized callable (K, 2) -> (K, 2)."""
    return lambda X: pendulum_step_batch(params, X)


def pendulum_energy(x) -> np.ndarray:
    """E = theta_dot^2 / 2 + (1 - cos theta), wall potential excluded."""
    x = np.asarray(x, dtype=float)
    return 0.5 * x[..., 1] ** 2 + (1.0 - np.cos(x[..., 0]))


UNIFORM = "uniform"
GAUSSIAN = "gaussian"
TRAJECTORIES = "traj"


@dataclass(frozen=True)
class DatasetSpec:
    """What to sample: kind, size, bounds, and kind-specific knobs."""

    kind: str
    size: int
    bounds: np.ndarray = field(default_factory=lambda: DEFAULT_BOUNDS.copy())
    center: tuple[float, float] = (0.0, 0.0)
    std: tuple[float, float] | None = None  # default: range / 4 per dim
    border_count: int = 100
    n_trajectories: int = 100
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bounds", np.asarray(self.bounds, dtype=float))
        if self.bounds.shape != (2, 2) or np.any(self.bounds[:, 1] <= self.bounds[:, 0]):
            raise DatasetSpecError(f"bad bounds {self.bounds!r}")
        if self.kind not in (UNIFORM, GAUSSIAN, TRAJECTORIES):
            raise DatasetSpecError(f"unknown dataset kind {self.kind!r}")
        if self.kind == UNIFORM and self.size < 4:
            raise DatasetSpecError("uniform grid needs at least 2x2 points")
        if self.kind == GAUSSIAN:
            if self.size < self.border_count:
                raise DatasetSpecError(
                    f"size {self.size} < border_count {self.border_count}"
                )
            c = np.asarray(self.center, dtype=float)
            if np.any(c < self.bounds[:, 0]) or np.any(c > self.bounds[:, 1]):
                raise DatasetSpecError(f"center {self.center} outside bounds")
        if self.kind == TRAJECTORIES and self.size < self.n_trajectories:
            raise DatasetSpecError(
                f"size {self.size} < n_trajectories {self.n_trajectories}"
            )

    def resolved_std(self) -> np.ndarray:
        if self.std is not None:
            return np.asarray(self.std, dtype=float)
        return (self.bounds[:, 1] - self.bounds[:, 0]) / 4.0

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "size": self.size,
            "bounds": self.bounds.tolist(),
            "center": list(self.center),
            "std": self.resolved_std().tolist(),
            "border_count": self.border_count,
            "n_trajectories": self.n_trajectories,
            "seed": self.seed,
        }


def _uniform_grid_points(spec: DatasetSpec) -> np.ndarray:
    side = int(math.isqrt(spec.size))
    if side * side != spec.size:
        warnings.warn(
            f"uniform size {spec.size} is not a square; using {side}x{side} "
            f"= {side * side} points",
            stacklevel=3,
        )
    axes = [np.linspace(lo, hi, side) for lo, hi in spec.bounds]
    g0, g1 = np.meshgrid(*axes, indexing="ij")
    return np.stack([g0.ravel(), g1.ravel()], axis=1)


def _border_points(bounds: np.ndarray, count: int) -> np.ndarray:
    """Evenly spaced perimeter points; all four corners are included."""
    (x0, x1), (y0, y1) = bounds
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    lengths = np.array([x1 - x0, y1 - y0, x1 - x0, y1 - y0], dtype=float)
    if count < 4:
        return corners[:count]
    # largest-remainder allocation of points per edge, one corner each
    quota = count * lengths / lengths.sum()
    alloc = np.maximum(np.floor(quota).astype(int), 1)
    rema = quota - alloc
    while alloc.sum() < count:
        i = int(np.argmax(rema))
        alloc[i] += 1
        rema[i] = -np.inf
    while alloc.sum() > count:
        i = int(np.argmin(rema))
        alloc[i] -= 1
        rema[i] = np.inf
    pts = []
    for e in range(4):
        start, end = corners[e], corners[(e + 1) % 4]
        t = np.arange(alloc[e]) / alloc[e]
        pts.append(start[None, :] + t[:, None] * (end - start)[None, :])
    return np.vstack(pts)


def _gaussian_points(spec: DatasetSpec, rng: np.random.Generator) -> np.ndarray:
    n_interior = spec.size - spec.border_count
    center = np.asarray(spec.center, dtype=float)
    std = spec.resolved_std()
    lo, hi = spec.bounds[:, 0], spec.bounds[:, 1]
    samples = np.empty((n_interior, 2))
    have = 0
    while have < n_interior:
        draw = rng.normal(center, std, size=(max(n_interior - have, 64), 2))
        ok = draw[np.all((draw >= lo) & (draw <= hi), axis=1)]
        take = min(len(ok), n_interior - have)
        samples[have : have + take] = ok[:take]
        have += take
    return np.vstack([_border_points(spec.bounds, spec.border_count), samples])


def generate(spec: DatasetSpec, params: PendulumParams) -> TransitionDataset:
    """Sample the pendulum map according to ``spec``; fully seeded."""
    rng = np.random.default_rng(spec.seed)
    provenance = {"spec": spec.as_dict(), "params": params.as_dict()}

    if spec.kind == UNIFORM:
        X = _uniform_grid_points(spec)
        Y = pendulum_step_batch(params, X)
        provenance["actual_size"] = len(X)
        return TransitionDataset.from_pairs(X, Y, provenance)

    if spec.kind == GAUSSIAN:
        X = _gaussian_points(spec, rng)
        Y = pendulum_step_batch(params, X)
        provenance["actual_size"] = len(X)
        return TransitionDataset.from_pairs(X, Y, provenance)

    # trajectories: n_trajectories initial conditions rolled forward the
    # same number of steps; pairs are stored trajectory-major
    steps = spec.size // spec.n_trajectories
    if steps * spec.n_trajectories != spec.size:
        warnings.warn(
            f"trajectory size {spec.size} not divisible by "
            f"{spec.n_trajectories} trajectories; using {steps} steps each "
            f"({steps * spec.n_trajectories} pairs)",
            stacklevel=2,
        )
    lo, hi = spec.bounds[:, 0], spec.bounds[:, 1]
    states = rng.uniform(lo, hi, size=(spec.n_trajectories, 2))
    xs = np.empty((spec.n_trajectories, steps, 2))
    ys = np.empty((spec.n_trajectories, steps, 2))
    current = states
    for t in range(steps):
        nxt = pendulum_step_batch(params, current)
        xs[:, t] = current
        ys[:, t] = nxt
        current = nxt
    X = xs.reshape(-1, 2)
    Y = ys.reshape(-1, 2)
    provenance["actual_size"] = len(X)
    provenance["n_trajectories"] = spec.n_trajectories
    provenance["steps_per_trajectory"] = steps
    return TransitionDataset.from_pairs(X, Y, provenance)
