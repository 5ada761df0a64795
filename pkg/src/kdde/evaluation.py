"""Model accuracy protocol: one-step SSE fields, averages, convergence.

A model is scored by lifting every point of a uniform evaluation grid,
advancing one step linearly, reading the state block back out, and
comparing against the true map.  Per-cell squared errors are summed over
the dynamic range (rectangle bounds or the convex hull of a training
cloud) and their spread is reported as a population variance.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import Delaunay

from .dictionary import Dictionary, make_rbf_grid
from .dynamics import DatasetSpec, PendulumParams, generate, pendulum_map
from .edmd import fit_edmd
from .encoder import (
    KoopmanModel,
    TransitionDataset,
    compute_grams,
    fit_dde,
)
from .errors import DatasetSpecError, NotStateInclusive
from .mesh import PointCloud, build_mesh


class EvalDomain:
    """Region the SSE grid covers: a rectangle or a point-cloud hull."""

    def __init__(self, bbox: np.ndarray, hull: Delaunay | None = None):
        self.bbox = np.asarray(bbox, dtype=float)
        self._hull = hull

    @classmethod
    def from_bounds(cls, bounds) -> "EvalDomain":
        return cls(np.asarray(bounds, dtype=float))

    @classmethod
    def from_points(cls, points) -> "EvalDomain":
        points = np.asarray(points, dtype=float)
        bbox = np.stack([points.min(axis=0), points.max(axis=0)], axis=1)
        return cls(bbox, Delaunay(points))

    def contains(self, X: np.ndarray) -> np.ndarray:
        if self._hull is not None:
            return self._hull.find_simplex(X) >= 0
        lo, hi = self.bbox[:, 0], self.bbox[:, 1]
        return np.all((X >= lo) & (X <= hi), axis=1)

    def grid(self, resolution: tuple[int, int]) -> tuple[np.ndarray, tuple[int, int]]:
        """Cell-center points of a uniform partition of the bounding box.

        Midpoint discretization: the box is split into resolution[d] cells
        per axis and each cell contributes its center, so the equal-weight
        SSE sum approximates the SSE integral without double-counting the
        border.
        """
        axes = [
            lo + (np.arange(r) + 0.5) * (hi - lo) / r
            for (lo, hi), r in zip(self.bbox, resolution)
        ]
        g0, g1 = np.meshgrid(*axes, indexing="ij")
        return np.stack([g0.ravel(), g1.ravel()], axis=1), tuple(resolution)


@dataclass(frozen=True)
class EvalReport:
    """Per-grid-point one-step SSE with totals over the masked cells."""

    grid_shape: tuple[int, int]
    sse: np.ndarray  # (grid_shape) array, NaN outside the mask
    mask: np.ndarray  # (grid_shape) bool, True = inside the dynamic range
    total_sse: float
    sse_variance: float
    meta: dict = field(default_factory=dict)

    @property
    def masked_values(self) -> np.ndarray:
        return self.sse[self.mask]


def sse_grid(
    model: KoopmanModel,
    truth,
    domain: EvalDomain,
    resolution: tuple[int, int] = (100, 100),
    dictionary: Dictionary | None = None,
) -> EvalReport:
    """One-step SSE field of ``model`` against the true map over ``domain``.

    ``truth`` is either a vectorized map (K, n) -> (K, n) or a
    :class:`PendulumParams`.  SSE is measured on the raw state components
    read out of the lifted prediction.
    """
    d = dictionary if dictionary is not None else model.dictionary
    if not d.is_state_inclusive:
        raise NotStateInclusive("evaluation needs a state-inclusive dictionary")
    truth_map = pendulum_map(truth) if isinstance(truth, PendulumParams) else truth

    points, grid_shape = domain.grid(resolution)
    mask_flat = domain.contains(points)
    Z = d.lift_batch(points)
    pred = d.extract_state(Z @ model.A.T)
    true_next = truth_map(points)
    err = np.sum((pred - true_next) ** 2, axis=1)

    sse = np.full(len(points), np.nan)
    sse[mask_flat] = err[mask_flat]
    masked = err[mask_flat]
    report = EvalReport(
        grid_shape=grid_shape,
        sse=sse.reshape(grid_shape),
        mask=mask_flat.reshape(grid_shape),
        total_sse=float(masked.sum()),
        sse_variance=float(masked.var()),
        meta={"method": model.method, "resolution": list(grid_shape)},
    )
    return report


def rbf_grid_for_data(
    X: np.ndarray, grid_shape: tuple[int, int], width_factor: float = 1.0
) -> Dictionary:
    """RBF dictionary with centers spanning the per-dimension data range."""
    X = np.asarray(X, dtype=float)
    bounds = np.stack([X.min(axis=0), X.max(axis=0)], axis=1)
    return make_rbf_grid(grid_shape, bounds, width_factor=width_factor)


def eval_domain_for(data: TransitionDataset) -> EvalDomain:
    """Dynamic range of a dataset: its bounds box for grid/cloud kinds,
    the hull of the sampled states for trajectory data."""
    kind = data.provenance.get("spec", {}).get("kind")
    if kind in ("uniform", "gaussian"):
        return EvalDomain.from_bounds(data.provenance["spec"]["bounds"])
    return EvalDomain.from_points(data.x)


@dataclass(frozen=True)
class ProtocolResult:
    """Seed-averaged totals of the repeated-fit comparison."""

    center: tuple[float, float]
    sizes: tuple[int, ...]
    repeats: int
    # mean/std of total SSE and mean per-cell variance, keyed [size][method]
    mean_total: dict
    std_total: dict
    mean_variance: dict


def gaussian_protocol(
    center,
    sizes,
    repeats: int = 8,
    grid_shape: tuple[int, int] = (5, 5),
    width_factor: float = 1.0,
    params: PendulumParams | None = None,
    resolution: tuple[int, int] = (100, 100),
    ridge: float = 0.0,
    rcond: float = 1e-12,
    base_seed: int = 0,
) -> ProtocolResult:
    """Fit both methods on ``repeats`` freshly seeded Gaussian datasets.

    Each repeat draws a new dataset, fits the encoder and the baseline on
    the same lifted observables, and scores both on the same grid; totals
    are averaged across repeats per method.
    """
    params = params or PendulumParams()
    sizes = tuple(int(s) for s in sizes)
    mean_total: dict = {}
    std_total: dict = {}
    mean_variance: dict = {}
    for size in sizes:
        totals = {"edmd": [], "dde": []}
        variances = {"edmd": [], "dde": []}
        for rep in range(repeats):
            spec = DatasetSpec(
                kind="gaussian",
                size=size,
                center=tuple(center),
                seed=base_seed + 1000 * rep + size,
            )
            data = generate(spec, params)
            dictionary = rbf_grid_for_data(data.x, grid_shape, width_factor)
            domain = eval_domain_for(data)
            for method, model in (
                ("edmd", fit_edmd(data, dictionary, rcond=rcond)),
                ("dde", fit_dde(data, dictionary, ridge=ridge)),
            ):
                report = sse_grid(model, params, domain, resolution)
                totals[method].append(report.total_sse)
                variances[method].append(report.sse_variance)
        mean_total[size] = {m: float(np.mean(v)) for m, v in totals.items()}
        std_total[size] = {m: float(np.std(v)) for m, v in totals.items()}
        mean_variance[size] = {m: float(np.mean(v)) for m, v in variances.items()}
    return ProtocolResult(
        tuple(center), sizes, repeats, mean_total, std_total, mean_variance
    )


@dataclass(frozen=True)
class ConvergenceTrace:
    """Selected Gram entries recorded against growing dataset size."""

    sizes: tuple[int, ...]
    selectors: tuple[tuple[int, int], ...]
    q_entries: np.ndarray  # (len(sizes), len(selectors))
    r_entries: np.ndarray

    def rows(self):
        """Rows 'N, entry_id, value' for the trace CSV."""
        out = []
        for si, n in enumerate(self.sizes):
            for ei, (i, j) in enumerate(self.selectors):
                out.append((n, f"Q[{i},{j}]", self.q_entries[si, ei]))
                out.append((n, f"R[{i},{j}]", self.r_entries[si, ei]))
        return out


def q_convergence(
    sizes,
    spec_template: DatasetSpec,
    dictionary: Dictionary,
    selectors,
    params: PendulumParams | None = None,
) -> ConvergenceTrace:
    """Record selected R/Q entries while the dataset is refined.

    All sizes reuse the template's seed, so larger datasets extend the
    same trajectories; the dictionary is fixed across sizes so entries
    are comparable.
    """
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 2 or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise DatasetSpecError("sizes must be a strictly increasing list of >= 2")
    params = params or PendulumParams()
    selectors = tuple((int(i), int(j)) for i, j in selectors)
    q_entries = np.empty((len(sizes), len(selectors)))
    r_entries = np.empty((len(sizes), len(selectors)))
    for si, n in enumerate(sizes):
        data = generate(replace(spec_template, size=n), params)
        mesh = build_mesh(PointCloud.from_points(data.x))
        grams = compute_grams(data, dictionary, mesh)
        for ei, (i, j) in enumerate(selectors):
            q_entries[si, ei] = grams.Q[i, j]
            r_entries[si, ei] = grams.R[i, j]
    return ConvergenceTrace(sizes, selectors, q_entries, r_entries)
