"""Command-line surface: gen-data, fit, eval, convergence, lift, reproduce.

Exit codes: 0 success, 2 usage or bad specification, 3 IO failure,
4 numerical failure (singular grams, degenerate geometry).  The --seed
flag falls back to the KDDE_SEED environment variable, then 0.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import experiments
from .dictionary import load_mlp_dictionary, state_dictionary
from .dynamics import DEFAULT_BOUNDS, DatasetSpec, PendulumParams, generate
from .edmd import fit_edmd
from .encoder import fit_dde
from .errors import (
    DatasetSpecError,
    DegenerateBounds,
    DegenerateInput,
    DimensionMismatch,
    EmptyDataset,
    KddeError,
    MeshDataMismatch,
    NonFiniteInput,
    NotStateInclusive,
    SchemaError,
    SingularGram,
    TooFewPoints,
)
from .evaluation import (
    EvalDomain,
    eval_domain_for,
    q_convergence,
    rbf_grid_for_data,
)
from . import fileio

USAGE_ERRORS = (SchemaError, DatasetSpecError, DimensionMismatch, DegenerateBounds, EmptyDataset)
NUMERICAL_ERRORS = (
    SingularGram,
    DegenerateInput,
    TooFewPoints,
    MeshDataMismatch,
    NonFiniteInput,
    NotStateInclusive,
)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("KDDE_SEED", "0"))


def _parse_pair(text: str, name: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise DatasetSpecError(f"{name} must be 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise DatasetSpecError(f"grid must be 'AxB', got {text!r}")
    return int(parts[0]), int(parts[1])


def _pendulum_params(args) -> PendulumParams:
    return PendulumParams(
        wall_stiffness=args.wall_k,
        damping=args.wall_c,
        dt=args.dt,
        substeps=args.substeps,
    )


def _add_pendulum_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dt", type=float, default=0.2, help="map time step [s]")
    p.add_argument("--substeps", type=int, default=20, help="RK4 substeps per map step")
    p.add_argument("--wall-k", type=float, default=200.0, help="wall stiffness")
    p.add_argument("--wall-c", type=float, default=1.0, help="damping coefficient")


def _build_dictionary(spec: str, data_x: np.ndarray, width_factor: float):
    if spec == "state":
        return state_dictionary(data_x.shape[1])
    if spec.startswith("rbf:"):
        return rbf_grid_for_data(data_x, _parse_grid(spec[4:]), width_factor)
    if spec.startswith("mlp:"):
        return load_mlp_dictionary(spec[4:])
    raise DatasetSpecError(
        f"unknown dictionary spec {spec!r} (use state, rbf:AxB, or mlp:file.json)"
    )


# -- subcommands -------------------------------------------------------------


def cmd_gen_data(args) -> int:
    bounds = DEFAULT_BOUNDS
    if args.bounds:
        vals = [float(v) for v in args.bounds.split(",")]
        if len(vals) != 4:
            raise DatasetSpecError("--bounds must be 'th_lo,th_hi,om_lo,om_hi'")
        bounds = np.array([[vals[0], vals[1]], [vals[2], vals[3]]])
    spec = DatasetSpec(
        kind=args.kind,
        size=args.n,
        bounds=bounds,
        center=_parse_pair(args.center, "--center"),
        std=_parse_pair(args.std, "--std") if args.std else None,
        border_count=args.border_count,
        n_trajectories=args.n_traj,
        seed=_seed(args),
    )
    data = generate(spec, _pendulum_params(args))
    fileio.save_dataset(data, args.out)
    print(f"wrote {len(data)} pairs to {args.out}")
    return 0


def cmd_fit(args) -> int:
    data = fileio.load_dataset(args.data)
    dictionary = _build_dictionary(args.dict, data.x, args.width_factor)
    if args.method == "dde":
        model = fit_dde(data, dictionary, ridge=args.ridge)
        if args.dump_mesh:
            from .mesh import PointCloud, build_mesh

            build_mesh(PointCloud.from_points(data.x)).to_json(args.dump_mesh)
        print(
            f"condition estimate: {model.meta['condition_estimate']:.6g}\n"
            f"hull volume: {model.meta['hull_volume']:.6g}\n"
            f"out-of-hull targets: {model.meta['out_of_hull_targets']}"
        )
    else:
        model = fit_edmd(data, dictionary, rcond=args.rcond)
        cond = np.linalg.cond(model.A)
        print(f"condition estimate (A): {cond:.6g}")
    fileio.save_model(model, args.out)
    print(f"wrote {model.A.shape[0]}x{model.A.shape[1]} {args.method} model to {args.out}")
    return 0


def cmd_eval(args) -> int:
    model = fileio.load_model(args.model)
    params = _pendulum_params(args)
    if args.data:
        data = fileio.load_dataset(args.data)
        prov = data.provenance.get("params", {})
        if prov and not args.override_truth:
            params = PendulumParams(
                wall_stiffness=prov["wall_stiffness"],
                damping=prov["damping"],
                wall_angle=prov["wall_angle"],
                dt=prov["dt"],
                substeps=prov["substeps"],
            )
        domain = eval_domain_for(data)
    elif args.bounds:
        vals = [float(v) for v in args.bounds.split(",")]
        domain = EvalDomain.from_bounds([[vals[0], vals[1]], [vals[2], vals[3]]])
    else:
        raise DatasetSpecError("eval needs --data or --bounds to define the range")
    from .evaluation import sse_grid

    report = sse_grid(model, params, domain, _parse_grid(args.grid))
    if args.out:
        fileio.save_report(report, args.out)
    print(f"total_sse: {report.total_sse:.17g}")
    print(f"sse_variance: {report.sse_variance:.17g}")
    return 0


def cmd_convergence(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    params = _pendulum_params(args)
    spec = DatasetSpec(
        kind="traj", size=max(sizes), n_trajectories=args.n_traj, seed=_seed(args)
    )
    largest = generate(spec, params)
    dictionary = rbf_grid_for_data(largest.x, _parse_grid(args.grid_shape), args.width_factor)
    n = dictionary.input_dim
    centers = dictionary.params["centers"]
    dist = np.linalg.norm(centers, axis=1)
    ranked = np.argsort(dist)
    picks = [ranked[0], ranked[len(ranked) // 2], ranked[-1]]
    selectors = [(0, 0)] + [(n + int(i), n + int(i)) for i in picks]
    trace = q_convergence(sizes, spec, dictionary, selectors, params)
    with open(args.out, "w") as fh:
        fh.write("N,entry_id,value\n")
        for n_, entry, value in trace.rows():
            fh.write(f"{n_},{entry},{value:.17g}\n")
    print(f"wrote trace of {len(selectors)} entries x {len(sizes)} sizes to {args.out}")
    return 0


def cmd_lift(args) -> int:
    X = fileio.load_states(args.data)
    dictionary = _build_dictionary(args.dict, X, args.width_factor)
    Z = dictionary.lift_batch(X)
    fileio.save_states(Z, args.out)
    print(f"lifted {X.shape[0]} states from n={X.shape[1]} to m={Z.shape[1]}")
    return 0


def cmd_reproduce(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else None
    seed = _seed(args)
    if args.table == "I":
        uniform = experiments.run_size_sweep(
            "uniform", sizes or experiments.UNIFORM_SIZES, seed=seed
        )
        traj = experiments.run_size_sweep(
            "traj", sizes or experiments.TRAJECTORY_SIZES, seed=seed
        )
        text = markdown = experiments.markdown_size_table(uniform, traj)
    elif args.table == "II":
        table = experiments.run_gaussian_table(
            sizes=sizes or experiments.GAUSSIAN_SIZES,
            repeats=args.repeats,
            seed=seed,
            jobs=args.jobs,
        )
        text = markdown = experiments.markdown_gaussian_table(table)
    else:
        rows = experiments.run_observable_orders(
            size=(sizes[0] if sizes else 5000), seed=seed
        )
        text = markdown = experiments.markdown_observables_table(rows)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(markdown + "\n")
    return 0


# -- wiring ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdde",
        description="Koopman linear models from data: mesh-weighted encoding "
        "and an EDMD baseline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="sample the pendulum map into a CSV dataset")
    p.add_argument("--kind", required=True, choices=["uniform", "gaussian", "traj"])
    p.add_argument("--n", type=int, required=True, help="target number of pairs")
    p.add_argument("--center", default="0,0", help="Gaussian center 'a,b'")
    p.add_argument("--std", default=None, help="Gaussian std 'a,b' (default range/4)")
    p.add_argument("--bounds", default=None, help="'th_lo,th_hi,om_lo,om_hi'")
    p.add_argument("--border-count", type=int, default=100)
    p.add_argument("--n-traj", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_pendulum_flags(p)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("fit", help="fit a lifted linear model from a dataset")
    p.add_argument("--method", required=True, choices=["dde", "edmd"])
    p.add_argument("--dict", required=True, help="state | rbf:AxB | mlp:file.json")
    p.add_argument("--data", required=True)
    p.add_argument("--ridge", type=float, default=0.0)
    p.add_argument("--rcond", type=float, default=1e-12)
    p.add_argument("--width-factor", type=float, default=1.0)
    p.add_argument("--dump-mesh", default=None, help="write mesh JSON here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="one-step SSE of a model over the dynamic range")
    p.add_argument("--model", required=True)
    p.add_argument("--data", default=None, help="dataset defining the range")
    p.add_argument("--bounds", default=None, help="'th_lo,th_hi,om_lo,om_hi'")
    p.add_argument("--grid", default="100x100")
    p.add_argument("--override-truth", action="store_true",
                   help="use the CLI pendulum flags even when the dataset "
                   "provenance records parameters")
    p.add_argument("--out", default=None, help="report CSV path")
    _add_pendulum_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("convergence", help="trace Gram entries against dataset size")
    p.add_argument("--sizes", required=True, help="comma-separated increasing sizes")
    p.add_argument("--n-traj", type=int, default=100)
    p.add_argument("--grid-shape", default="5x5")
    p.add_argument("--width-factor", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_pendulum_flags(p)
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("lift", help="apply a dictionary to a CSV of states")
    p.add_argument("--dict", required=True)
    p.add_argument("--data", required=True, help="CSV with header x1..xn")
    p.add_argument("--width-factor", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("reproduce", help="run a full experiment table")
    p.add_argument("--table", required=True, choices=["I", "II", "III"])
    p.add_argument("--sizes", default=None, help="override dataset sizes")
    p.add_argument("--repeats", type=int, default=8)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="write the Markdown table here")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4
    except KddeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
