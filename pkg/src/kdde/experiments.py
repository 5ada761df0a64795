"""Prebuilt experiment pipelines behind the `reproduce` CLI command.

Each runner fits the encoder and the least-squares baseline on the same
data and dictionary, scores both over the dynamic range, and returns rows
ready for Markdown rendering.  The same runners back the acceptance
tests, so the CLI and the test suite exercise one code path.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

from .dynamics import DatasetSpec, PendulumParams, generate
from .edmd import fit_edmd
from .encoder import fit_dde
from .evaluation import (
    eval_domain_for,
    gaussian_protocol,
    rbf_grid_for_data,
    sse_grid,
)

UNIFORM_SIZES = (900, 2500, 10000, 22500)
TRAJECTORY_SIZES = (1000, 2500, 5000, 10000, 25000)
GAUSSIAN_CENTERS = ((0.0, 0.0), (0.8, 0.0), (0.0, 2.0))
GAUSSIAN_SIZES = (1000, 2500, 5000, 10000, 25000)
OBSERVABLE_GRIDS = ((5, 5), (7, 7), (9, 9))


def fit_and_score(
    data,
    grid_shape=(5, 5),
    width_factor: float = 1.0,
    params: PendulumParams | None = None,
    resolution=(100, 100),
    ridge: float = 0.0,
    rcond: float = 1e-12,
) -> dict:
    """Fit EDMD and DDE on one dataset; one-step SSE totals for both."""
    params = params or PendulumParams()
    dictionary = rbf_grid_for_data(data.x, grid_shape, width_factor)
    domain = eval_domain_for(data)
    out = {"size": len(data), "observables": dictionary.output_dim}
    for method, model in (
        ("edmd", fit_edmd(data, dictionary, rcond=rcond)),
        ("dde", fit_dde(data, dictionary, ridge=ridge)),
    ):
        report = sse_grid(model, params, domain, resolution)
        out[f"sse_{method}"] = report.total_sse
        out[f"var_{method}"] = report.sse_variance
    return out


def run_size_sweep(
    kind: str,
    sizes,
    grid_shape=(5, 5),
    width_factor: float = 1.0,
    params: PendulumParams | None = None,
    resolution=(100, 100),
    seed: int = 0,
) -> list[dict]:
    """Uniform-grid or trajectory datasets of growing size (one seed)."""
    params = params or PendulumParams()
    rows = []
    for size in sizes:
        data = generate(DatasetSpec(kind=kind, size=size, seed=seed), params)
        row = fit_and_score(data, grid_shape, width_factor, params, resolution)
        row["size"] = size
        rows.append(row)
    return rows


def _gaussian_cell(args) -> tuple:
    center, size, repeats, grid_shape, width_factor, resolution, seed = args
    result = gaussian_protocol(
        center,
        [size],
        repeats=repeats,
        grid_shape=grid_shape,
        width_factor=width_factor,
        resolution=resolution,
        base_seed=seed,
    )
    return (
        center,
        size,
        result.mean_total[size],
        result.std_total[size],
        result.mean_variance[size],
    )


def run_gaussian_table(
    centers=GAUSSIAN_CENTERS,
    sizes=GAUSSIAN_SIZES,
    repeats: int = 8,
    grid_shape=(5, 5),
    width_factor: float = 1.0,
    resolution=(100, 100),
    seed: int = 0,
    jobs: int = 1,
) -> dict:
    """Seed-averaged totals per (center, size); parallel over cells."""
    cells = [
        (tuple(c), int(s), repeats, tuple(grid_shape), width_factor, tuple(resolution), seed)
        for c in centers
        for s in sizes
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_gaussian_cell, cells))
    else:
        results = [_gaussian_cell(c) for c in cells]
    table: dict = {}
    for center, size, mean, std, var in results:
        table.setdefault(center, {})[size] = {
            "mean": mean,
            "std": std,
            "variance": var,
        }
    return table


def run_observable_orders(
    grids=OBSERVABLE_GRIDS,
    size: int = 5000,
    width_factor: float = 1.0,
    params: PendulumParams | None = None,
    resolution=(100, 100),
    seed: int = 0,
) -> list[dict]:
    """Same trajectory dataset, growing dictionary order."""
    params = params or PendulumParams()
    data = generate(DatasetSpec(kind="traj", size=size, seed=seed), params)
    rows = []
    for grid_shape in grids:
        rows.append(
            fit_and_score(data, tuple(grid_shape), width_factor, params, resolution)
        )
    return rows


# -- Markdown rendering -------------------------------------------------------


def markdown_size_table(uniform_rows, trajectory_rows) -> str:
    lines = [
        "| Dataset Size | Total SSE (EDMD / DDE) | SSE Variance (EDMD / DDE) |",
        "|---|---|---|",
    ]
    for title, rows in (("Uniform", uniform_rows), ("Trajectories", trajectory_rows)):
        lines.append(f"| **{title}** | | |")
        for r in rows:
            lines.append(
                f"| {r['size']} | {r['sse_edmd']:.3f} / {r['sse_dde']:.3f} "
                f"| {r['var_edmd']:.4f} / {r['var_dde']:.4f} |"
            )
    return "\n".join(lines)


def markdown_gaussian_table(table: dict) -> str:
    centers = list(table.keys())
    header = " | ".join(f"Center {list(c)} (EDMD / DDE)" for c in centers)
    lines = [
        f"| Dataset Size | {header} |",
        "|" + "---|" * (len(centers) + 1),
    ]
    sizes = sorted(next(iter(table.values())).keys())
    for size in sizes:
        cols = []
        for c in centers:
            cell = table[c][size]["mean"]
            cols.append(f"{cell['edmd']:.3f} / {cell['dde']:.3f}")
        lines.append(f"| {size} | " + " | ".join(cols) + " |")
    return "\n".join(lines)


def markdown_observables_table(rows) -> str:
    lines = [
        "| # Observables | Total SSE EDMD | Total SSE DDE |",
        "|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {r['observables']} | {r['sse_edmd']:.3f} | {r['sse_dde']:.3f} |"
        )
    return "\n".join(lines)
