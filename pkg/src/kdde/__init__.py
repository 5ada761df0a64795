"""Koopman linear models from sampled nonlinear transitions.

Two estimators over the same observable dictionaries:

- ``fit_dde``: encodes the transition map through inner products of
  observables, computed as volume-weighted sums over a simplicial mesh of
  the data (weights from a Delaunay partition of the dynamic range), then
  solves A = Q R^-1.
- ``fit_edmd``: plain least squares over the lifted samples, the standard
  extended-DMD baseline.

Plus the wall-pendulum benchmark, dataset generators, and the SSE-over-
dynamic-range evaluation protocol used to compare the two.
"""

from .dictionary import (
    Dictionary,
    MlpWeights,
    concat,
    from_descriptor,
    load_mlp_dictionary,
    load_mlp_weights_file,
    make_rbf_grid,
    state_dictionary,
)
from .dynamics import (
    DatasetSpec,
    PendulumParams,
    generate,
    pendulum_accel,
    pendulum_energy,
    pendulum_map,
    pendulum_step,
    pendulum_step_batch,
)
from .edmd import fit_edmd
from .encoder import (
    GramPair,
    KoopmanModel,
    TransitionDataset,
    assemble,
    compute_grams,
    equal_weight_grams,
    fit_dde,
    predict,
)
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
    ConvergenceTrace,
    EvalDomain,
    EvalReport,
    eval_domain_for,
    gaussian_protocol,
    q_convergence,
    rbf_grid_for_data,
    sse_grid,
)
from .mesh import (
    PointCloud,
    RefinementMetric,
    SimplicialMesh,
    build_mesh,
    node_volumes,
    refinement_metric,
    simplex_volume,
)

__version__ = "0.1.0"

__all__ = [
    "Dictionary",
    "MlpWeights",
    "concat",
    "from_descriptor",
    "load_mlp_dictionary",
    "load_mlp_weights_file",
    "make_rbf_grid",
    "state_dictionary",
    "DatasetSpec",
    "PendulumParams",
    "generate",
    "pendulum_accel",
    "pendulum_energy",
    "pendulum_map",
    "pendulum_step",
    "pendulum_step_batch",
    "fit_edmd",
    "GramPair",
    "KoopmanModel",
    "TransitionDataset",
    "assemble",
    "compute_grams",
    "equal_weight_grams",
    "fit_dde",
    "predict",
    "KddeError",
    "DimensionMismatch",
    "NonFiniteInput",
    "DegenerateBounds",
    "SchemaError",
    "DegenerateInput",
    "TooFewPoints",
    "MeshDataMismatch",
    "SingularGram",
    "NotStateInclusive",
    "EmptyDataset",
    "DatasetSpecError",
    "ConvergenceTrace",
    "EvalDomain",
    "EvalReport",
    "eval_domain_for",
    "gaussian_protocol",
    "q_convergence",
    "rbf_grid_for_data",
    "sse_grid",
    "PointCloud",
    "RefinementMetric",
    "SimplicialMesh",
    "build_mesh",
    "node_volumes",
    "refinement_metric",
    "simplex_volume",
]
