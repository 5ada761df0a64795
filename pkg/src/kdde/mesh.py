"""Simplicial meshing of the dynamic range and quadrature volumes.

The sampled states span a convex dynamic range.  A Delaunay triangulation
of the samples partitions that range into simplices; each simplex volume
is split evenly among its n+1 vertices, giving every data point a
quadrature weight (its node volume).  Summed against integrand values at
the nodes, these weights turn inner-product integrals over the range into
plain weighted sums.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import Delaunay, QhullError, cKDTree

from .errors import DegenerateInput, NonFiniteInput, TooFewPoints

# Simplices thinner than this fraction of the hull volume are treated as
# slivers: dropped, with their volume redistributed over the survivors.
SLIVER_FRACTION = 1e-12

# Triangulating above this dimension is known to be slow and fragile.
HIGH_DIM_WARN = 8


@dataclass(frozen=True)
class PointCloud:
    """Deduplicated sample sites used as mesh nodes.

    ``merge_map[i]`` gives the node index that original point i was merged
    into; ``source_count`` is the original point count.  Points closer
    than ``dedup_tolerance`` are merged to their group mean.
    """

    dim: int
    points: np.ndarray
    dedup_tolerance: float
    merge_map: np.ndarray
    source_count: int

    @classmethod
    def from_points(cls, points, dedup_tolerance: float | None = None) -> "PointCloud":
        points = np.asarray(points, dtype=float)
        if points.ndim != 2:
            raise DegenerateInput(f"expected (N, n) points, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise NonFiniteInput("point cloud contains NaN or Inf")
        n_src, dim = points.shape
        if dedup_tolerance is None:
            span = points.max(axis=0) - points.min(axis=0) if n_src else np.zeros(dim)
            dedup_tolerance = 1e-10 * float(np.linalg.norm(span))

        if dedup_tolerance > 0 and n_src > 1:
            pairs = cKDTree(points).query_pairs(dedup_tolerance, output_type="ndarray")
        else:
            pairs = np.empty((0, 2), dtype=int)
        if len(pairs):
            adj = coo_matrix(
                (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                shape=(n_src, n_src),
            )
            n_nodes, labels = connected_components(adj, directed=False)
            # relabel so node order follows first occurrence in the input
            first = np.full(n_nodes, n_src, dtype=int)
            np.minimum.at(first, labels, np.arange(n_src))
            order = np.argsort(first, kind="stable")
            rank = np.empty(n_nodes, dtype=int)
            rank[order] = np.arange(n_nodes)
            merge_map = rank[labels]
            merged = np.zeros((n_nodes, dim))
            np.add.at(merged, merge_map, points)
            counts = np.bincount(merge_map, minlength=n_nodes).astype(float)
            merged /= counts[:, None]
        else:
            merge_map = np.arange(n_src)
            merged = points.copy()
        merged.setflags(write=False)
        merge_map.setflags(write=False)
        return cls(dim, merged, float(dedup_tolerance), merge_map, n_src)

    def __len__(self) -> int:
        return self.points.shape[0]

    def group_average(self, values: np.ndarray) -> np.ndarray:
        """Average per-source values over merged groups -> per-node values."""
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.source_count:
            raise DegenerateInput(
                f"expected {self.source_count} rows, got {values.shape[0]}"
            )
        out = np.zeros((len(self),) + values.shape[1:])
        np.add.at(out, self.merge_map, values)
        counts = np.bincount(self.merge_map, minlength=len(self)).astype(float)
        return out / counts.reshape((-1,) + (1,) * (values.ndim - 1))


@dataclass(frozen=True)
class SimplicialMesh:
    """Delaunay partition of the convex hull of a point cloud.

    Volumes satisfy sum(simplex_volumes) == sum(node_volumes) ==
    hull_volume to 1e-9 relative; the mesh is immutable and safe for
    concurrent reads.
    """

    nodes: PointCloud
    simplices: np.ndarray
    simplex_volumes: np.ndarray
    node_volumes: np.ndarray
    hull_volume: float
    _delaunay: Delaunay = field(repr=False)

    @property
    def dim(self) -> int:
        return self.nodes.dim

    def contains(self, X) -> np.ndarray:
        """Boolean mask: which query points lie inside the convex hull."""
        X = np.asarray(X, dtype=float)
        return self._delaunay.find_simplex(X) >= 0

    def locate(self, X) -> np.ndarray:
        """Index of the containing (kept) simplex per point, -1 if none."""
        X = np.asarray(X, dtype=float)
        raw = self._delaunay.find_simplex(X)
        out = np.full(raw.shape, -1, dtype=int)
        inside = raw >= 0
        out[inside] = self._simplex_lookup[raw[inside]]
        return out

    @property
    def _simplex_lookup(self) -> np.ndarray:
        return self.__dict__["_lookup"]

    def to_json(self, path: str) -> None:
        """Debug dump: node coordinates, simplex tuples, and volumes."""
        doc = {
            "dim": self.dim,
            "nodes": self.nodes.points.tolist(),
            "simplices": self.simplices.tolist(),
            "simplex_volumes": self.simplex_volumes.tolist(),
            "node_volumes": self.node_volumes.tolist(),
            "hull_volume": self.hull_volume,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh)


def simplex_volume(vertices) -> float:
    """Volume of one n-simplex: |det[v2-v1, ..., v_{n+1}-v1]| / n!."""
    vertices = np.asarray(vertices, dtype=float)
    n = vertices.shape[1]
    if vertices.shape != (n + 1, n):
        raise DegenerateInput(f"need (n+1, n) vertices, got {vertices.shape}")
    edges = vertices[1:] - vertices[0]
    return abs(float(np.linalg.det(edges))) / float(math.factorial(n))


def _batch_volumes(points: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    verts = points[simplices]  # (P, n+1, n)
    edges = verts[:, 1:, :] - verts[:, :1, :]
    n = points.shape[1]
    return np.abs(np.linalg.det(edges)) / float(math.factorial(n))


def build_mesh(cloud: PointCloud | np.ndarray) -> SimplicialMesh:
    """Delaunay-triangulate a point cloud and attach quadrature volumes.

    Sliver simplices below SLIVER_FRACTION of the hull volume (a byproduct
    of cocircular inputs such as regular grids) are dropped and their
    volume spread proportionally over the remaining simplices, so volume
    conservation holds exactly.  Point order does not affect the result:
    sites are sorted lexicographically before triangulation.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud.from_points(cloud)
    points = cloud.points
    n_nodes, dim = points.shape
    if dim > HIGH_DIM_WARN:
        warnings.warn(
            f"triangulating in dimension {dim}; Delaunay meshing is known to be "
            "slow and numerically fragile above dimension 8",
            RuntimeWarning,
            stacklevel=2,
        )
    if n_nodes < dim + 1:
        raise TooFewPoints(f"{n_nodes} points cannot span a {dim}-simplex")
    rank = np.linalg.matrix_rank(points - points[0], tol=None)
    if rank < dim:
        raise DegenerateInput(
            f"points are affinely dependent (rank {rank} < {dim}); no "
            "full-dimensional hull exists"
        )

    # canonical site order -> triangulation independent of input permutation
    order = np.lexsort(points.T[::-1])
    sites = points[order]
    try:
        tri = Delaunay(sites)
    except QhullError:
        tri = Delaunay(sites, qhull_options="QJ")

    simplices = order[tri.simplices]
    volumes = _batch_volumes(points, simplices)
    hull_volume = float(volumes.sum())
    if hull_volume <= 0:
        raise DegenerateInput("triangulation produced zero total volume")

    keep = volumes > SLIVER_FRACTION * hull_volume
    lookup = np.full(len(volumes), -1, dtype=int)
    lookup[keep] = np.arange(int(keep.sum()))
    simplices = simplices[keep]
    volumes = volumes[keep]
    volumes *= hull_volume / volumes.sum()

    simplices.setflags(write=False)
    volumes.setflags(write=False)
    dv_k = node_volumes_from_arrays(simplices, volumes, n_nodes)
    dv_k.setflags(write=False)

    mesh = SimplicialMesh(cloud, simplices, volumes, dv_k, hull_volume, tri)
    # map from raw Delaunay simplex ids (which include dropped slivers) to
    # kept indices, used by locate()
    mesh.__dict__["_lookup"] = lookup
    return mesh


def node_volumes_from_arrays(
    simplices: np.ndarray, simplex_volumes: np.ndarray, n_nodes: int
) -> np.ndarray:
    """Even split of each simplex volume among its n+1 vertices."""
    k_p = simplices.shape[1]
    dv_k = np.zeros(n_nodes)
    np.add.at(dv_k, simplices.ravel(), np.repeat(simplex_volumes / k_p, k_p))
    return dv_k


def node_volumes(mesh: SimplicialMesh) -> np.ndarray:
    """Per-node quadrature weights of a built mesh."""
    return node_volumes_from_arrays(
        mesh.simplices, mesh.simplex_volumes, len(mesh.nodes)
    )


@dataclass(frozen=True)
class RefinementMetric:
    """Max centroid-to-vertex distance per simplex and globally.

    Shrinks toward zero under uniform refinement; the quadrature error of
    the node-volume sums vanishes in that limit.
    """

    per_simplex: np.ndarray
    global_max: float


def refinement_metric(mesh: SimplicialMesh) -> RefinementMetric:
    verts = mesh.nodes.points[mesh.simplices]  # (P, n+1, n)
    centroids = verts.mean(axis=1, keepdims=True)
    dists = np.linalg.norm(verts - centroids, axis=2)
    per_simplex = dists.max(axis=1)
    per_simplex.setflags(write=False)
    return RefinementMetric(per_simplex, float(per_simplex.max(initial=0.0)))
