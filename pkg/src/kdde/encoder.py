"""Volume-weighted Gram matrices and the encoded Koopman matrix A = QR^-1.

Inner products of observables over the dynamic range reduce, on a
simplicial mesh of the samples, to weighted sums over nodes:

    R[i,j] ~= sum_k g_i(x_k) g_j(x_k) dv_k
    Q[i,j] ~= sum_k g_i(x_k_next) g_j(x_k) dv_k

computed here as rank-1 outer-product accumulations (identical values,
O(K m^2)).  The transition matrix solves A R = Q through a symmetric
factorization; an explicit inverse is never formed.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .dictionary import Dictionary
from .errors import (
    DimensionMismatch,
    EmptyDataset,
    MeshDataMismatch,
    NonFiniteInput,
    NotStateInclusive,
    SingularGram,
)
from .mesh import PointCloud, SimplicialMesh, build_mesh

# R is declared singular when its eigenvalue ratio exceeds this (machine
# epsilon times a safety factor of 1e3).
COND_LIMIT = 1.0 / (np.finfo(float).eps * 1e3)

RESIDUAL_LIMIT = 1e-8


@dataclass(frozen=True)
class TransitionDataset:
    """Paired one-step samples (x_t, x_next) of an unknown map."""

    dim: int
    x: np.ndarray
    x_next: np.ndarray
    provenance: dict = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, x, x_next, provenance: dict | None = None) -> "TransitionDataset":
        x = np.asarray(x, dtype=float)
        x_next = np.asarray(x_next, dtype=float)
        if x.ndim != 2 or x.shape != x_next.shape:
            raise DimensionMismatch(
                f"paired samples must share an (N, n) shape, got {x.shape} and "
                f"{x_next.shape}"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(x_next))):
            raise NonFiniteInput("dataset contains NaN or Inf")
        x.setflags(write=False)
        x_next.setflags(write=False)
        return cls(x.shape[1], x, x_next, dict(provenance or {}))

    def __len__(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class GramPair:
    """Discretized Gram matrices with solve diagnostics.

    R is symmetric positive semidefinite by construction;
    condition_estimate is the eigenvalue ratio (inf when the smallest
    eigenvalue is nonpositive).
    """

    R: np.ndarray
    Q: np.ndarray
    condition_estimate: float
    node_count: int
    hull_volume: float


@dataclass(frozen=True)
class KoopmanModel:
    """Lifted linear model z_next = A z with its fit provenance."""

    dictionary: Dictionary
    A: np.ndarray
    method: str  # "dde" | "edmd"
    grams: GramPair | None = None
    meta: dict = field(default_factory=dict)

    def predict(self, x, steps: int = 1, relift: bool = False) -> np.ndarray:
        return predict(self, x, steps, relift=relift)


def compute_grams(
    data: TransitionDataset, dictionary: Dictionary, mesh: SimplicialMesh
) -> GramPair:
    """Accumulate R and Q over the mesh nodes of ``data``.

    The mesh must have been built on the x_t points of this dataset; the
    transition targets of merged duplicate sites are averaged, matching
    the integrand-mean approximation on each partition.
    """
    if mesh.nodes.source_count != len(data):
        raise MeshDataMismatch(
            f"mesh was built from {mesh.nodes.source_count} source points, "
            f"dataset has {len(data)}"
        )
    if dictionary.input_dim != data.dim:
        raise DimensionMismatch(
            f"dictionary expects n={dictionary.input_dim}, data has n={data.dim}"
        )
    targets = mesh.nodes.group_average(data.x_next)
    Z = dictionary.lift_batch(mesh.nodes.points)
    Zf = dictionary.lift_batch(targets)
    w = mesh.node_volumes

    WZ = w[:, None] * Z
    R = Z.T @ WZ
    R = 0.5 * (R + R.T)
    Q = Zf.T @ WZ

    eigs = np.linalg.eigvalsh(R)
    lam_min, lam_max = float(eigs[0]), float(eigs[-1])
    cond = np.inf if lam_min <= 0.0 or lam_max <= 0.0 else lam_max / lam_min
    R.setflags(write=False)
    Q.setflags(write=False)
    return GramPair(R, Q, cond, len(mesh.nodes), mesh.hull_volume)


def _solve(grams: GramPair, ridge: float) -> tuple[np.ndarray, float]:
    R, Q = grams.R, grams.Q
    if R.shape[0] != R.shape[1] or R.shape != Q.shape:
        raise DimensionMismatch(f"gram shapes {R.shape} / {Q.shape}")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    if ridge == 0.0 and grams.condition_estimate > COND_LIMIT:
        raise SingularGram(
            f"R condition estimate {grams.condition_estimate:.3e} exceeds "
            f"{COND_LIMIT:.3e}; the dictionary is dependent or the data are "
            "insufficient (set a ridge to proceed)"
        )
    R_reg = R + ridge * np.eye(R.shape[0]) if ridge else R
    A = scipy.linalg.solve(R_reg, Q.T, assume_a="sym").T
    residual = float(
        np.linalg.norm(A @ R_reg - Q, "fro") / max(np.linalg.norm(Q, "fro"), 1e-300)
    )
    if residual > RESIDUAL_LIMIT:
        warnings.warn(
            f"gram solve residual {residual:.3e} exceeds {RESIDUAL_LIMIT:.0e}",
            RuntimeWarning,
            stacklevel=3,
        )
    return A, residual


def assemble(grams: GramPair, ridge: float = 0.0) -> np.ndarray:
    """A = Q (R + ridge*I)^-1 via a symmetric factorization."""
    A, _ = _solve(grams, ridge)
    return A


def fit_dde(
    data: TransitionDataset,
    dictionary: Dictionary,
    ridge: float = 0.0,
    dedup_tolerance: float | None = None,
) -> KoopmanModel:
    """Full pipeline: dedup -> mesh -> node volumes -> grams -> solve."""
    if len(data) == 0:
        raise EmptyDataset("cannot fit on an empty dataset")
    if dictionary.input_dim != data.dim:
        raise DimensionMismatch(
            f"dictionary expects n={dictionary.input_dim}, data has n={data.dim}"
        )
    cloud = PointCloud.from_points(data.x, dedup_tolerance)
    mesh = build_mesh(cloud)
    grams = compute_grams(data, dictionary, mesh)
    A, residual = _solve(grams, ridge)
    out_of_hull = int(np.count_nonzero(~mesh.contains(data.x_next)))
    meta = {
        "provenance": dict(data.provenance),
        "n_samples": len(data),
        "n_nodes": len(mesh.nodes),
        "hull_volume": mesh.hull_volume,
        "condition_estimate": grams.condition_estimate,
        "solve_residual": residual,
        "ridge": float(ridge),
        "out_of_hull_targets": out_of_hull,
        "fit_time": time.time(),
    }
    A.setflags(write=False)
    return KoopmanModel(dictionary, A, "dde", grams, meta)


def predict(
    model: KoopmanModel,
    x,
    steps: int = 1,
    relift: bool = False,
    dictionary: Dictionary | None = None,
) -> np.ndarray:
    """Roll the lifted linear model forward; returns (steps, n) states.

    Default semantics propagate the lifted vector without re-lifting (a
    pure linear rollout); with ``relift`` the state block is read out and
    re-lifted after every step.
    """
    d = dictionary if dictionary is not None else model.dictionary
    if not d.is_state_inclusive:
        raise NotStateInclusive("prediction needs a state-inclusive dictionary")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    z = d.lift(x)
    out = np.empty((steps, d.input_dim))
    for t in range(steps):
        z = model.A @ z
        state = d.extract_state(z)
        out[t] = state
        if relift:
            z = d.lift(state)
    return out


def equal_weight_grams(data: TransitionDataset, dictionary: Dictionary) -> GramPair:
    """Grams with every sample weighted identically (no mesh).

    With equal weights the encoded solve reduces to the same normal
    equations as the least-squares baseline; useful for equivalence
    checks and for data too degenerate to mesh.
    """
    if len(data) == 0:
        raise EmptyDataset("cannot fit on an empty dataset")
    Z = dictionary.lift_batch(data.x)
    Zf = dictionary.lift_batch(data.x_next)
    R = Z.T @ Z / len(data)
    R = 0.5 * (R + R.T)
    Q = Zf.T @ Z / len(data)
    eigs = np.linalg.eigvalsh(R)
    lam_min, lam_max = float(eigs[0]), float(eigs[-1])
    cond = np.inf if lam_min <= 0.0 or lam_max <= 0.0 else lam_max / lam_min
    return GramPair(R, Q, cond, len(data), float("nan"))
