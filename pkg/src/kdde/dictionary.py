"""Observable dictionaries: lifting raw states x in R^n to z(x) in R^m.

A dictionary is an ordered set of m scalar observable functions.  The
kinds supported are a plain state copy, a state-inclusive Gaussian RBF
grid, an imported MLP (hidden layers of a trained network), and a
composite concatenation.  State-inclusive dictionaries put the raw state
variables in a fixed prefix slice so a linear model in lifted space can
read the predicted state back out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateBounds,
    DimensionMismatch,
    NonFiniteInput,
    NotStateInclusive,
    SchemaError,
)

STATE_ONLY = "state_only"
RBF_GRID = "rbf_grid"
MLP_IMPORTED = "mlp_imported"
COMPOSITE = "composite"

_ACTIVATIONS = ("relu", "linear")


def _as_point(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch(f"expected state of length {n}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("state contains NaN or Inf")
    return x


def _as_points(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != n:
        raise DimensionMismatch(f"expected (K, {n}) batch, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("batch contains NaN or Inf")
    return X


@dataclass(frozen=True)
class MlpWeights:
    """Weights of a feed-forward stack: list of (W, b, activation).

    Layer i maps R^in -> R^out with out = W.shape[0]; adjacent layers must
    chain (out of layer i equals in of layer i+1).
    """

    layers: tuple[tuple[np.ndarray, np.ndarray, str], ...]
    input_dim: int
    output_dim: int

    def __post_init__(self):
        if not self.layers:
            raise SchemaError("MLP weight stack is empty")
        prev = self.input_dim
        for i, (w, b, act) in enumerate(self.layers):
            if act not in _ACTIVATIONS:
                raise SchemaError(f"layer {i}: unknown activation {act!r}")
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise SchemaError(f"layer {i}: weight/bias shapes {w.shape}/{b.shape}")
            if w.shape[1] != prev:
                raise SchemaError(
                    f"layer {i}: input width {w.shape[1]} does not chain with {prev}"
                )
            prev = w.shape[0]
        if prev != self.output_dim:
            raise SchemaError(
                f"declared output_dim {self.output_dim} != last layer width {prev}"
            )

    def forward(self, X: np.ndarray) -> np.ndarray:
        """Apply the stack to a (K, input_dim) batch."""
        h = X
        for w, b, act in self.layers:
            h = h @ w.T + b
            if act == "relu":
                h = np.maximum(h, 0.0)
        return h


@dataclass(frozen=True)
class Dictionary:
    """Ordered set of m observables with vectorized lifting.

    ``state_block_index`` is a (start, stop) slice marking where the raw
    state variables sit inside z(x); None for non-state-inclusive
    dictionaries.  Instances are immutable; ``lift`` is pure and safe for
    concurrent calls.
    """

    kind: str
    input_dim: int
    output_dim: int
    params: dict = field(default_factory=dict)
    state_block_index: tuple[int, int] | None = None

    def __post_init__(self):
        if self.output_dim < 1:
            raise SchemaError("output_dim must be >= 1")
        if self.state_block_index is not None:
            lo, hi = self.state_block_index
            if hi - lo != self.input_dim or lo < 0 or hi > self.output_dim:
                raise SchemaError(f"bad state block {self.state_block_index}")

    # -- lifting ---------------------------------------------------------

    def lift(self, x) -> np.ndarray:
        """z(x) = [g_1(x) ... g_m(x)] for a single state x."""
        x = _as_point(x, self.input_dim)
        return self.lift_batch(x[None, :])[0]

    def lift_batch(self, X) -> np.ndarray:
        """Lift a (K, n) batch to (K, m)."""
        X = _as_points(X, self.input_dim)
        return self._lift_rows(X)

    def _lift_rows(self, X: np.ndarray) -> np.ndarray:
        if self.kind == STATE_ONLY:
            return X.copy()
        if self.kind == RBF_GRID:
            centers = self.params["centers"]
            width = self.params["width"]
            d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            rbf = np.exp(-d2 / (2.0 * width * width))
            return np.hstack([X, rbf])
        if self.kind == MLP_IMPORTED:
            h = self.params["weights"].forward(X)
            if self.params["include_state"]:
                return np.hstack([X, h])
            return h
        if self.kind == COMPOSITE:
            return np.hstack([c._lift_rows(X) for c in self.params["children"]])
        raise SchemaError(f"unknown dictionary kind {self.kind!r}")

    # -- state read-out --------------------------------------------------

    @property
    def is_state_inclusive(self) -> bool:
        return self.state_block_index is not None

    def extract_state(self, z: np.ndarray) -> np.ndarray:
        """Read the raw state slice back out of a lifted vector/batch."""
        if self.state_block_index is None:
            raise NotStateInclusive(f"{self.kind} dictionary has no state block")
        lo, hi = self.state_block_index
        return z[..., lo:hi]

    # -- serialization ---------------------------------------------------

    def to_descriptor(self) -> dict:
        """JSON-safe description sufficient to reconstruct the dictionary."""
        d = {
            "kind": self.kind,
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "state_block_index": list(self.state_block_index)
            if self.state_block_index
            else None,
        }
        if self.kind == RBF_GRID:
            d["grid_shape"] = list(self.params["grid_shape"])
            d["bounds"] = [list(b) for b in self.params["bounds"]]
            d["width_factor"] = self.params["width_factor"]
            d["width"] = self.params["width"]
            d["centers"] = self.params["centers"].tolist()
        elif self.kind == MLP_IMPORTED:
            w: MlpWeights = self.params["weights"]
            d["include_state"] = self.params["include_state"]
            d["layers"] = [
                {"w": lw.tolist(), "b": lb.tolist(), "act": act}
                for lw, lb, act in w.layers
            ]
        elif self.kind == COMPOSITE:
            d["children"] = [c.to_descriptor() for c in self.params["children"]]
        return d


def from_descriptor(d: dict) -> Dictionary:
    """Rebuild a Dictionary from :meth:`Dictionary.to_descriptor` output."""
    kind = d.get("kind")
    sbi = tuple(d["state_block_index"]) if d.get("state_block_index") else None
    if kind == STATE_ONLY:
        return state_dictionary(d["input_dim"])
    if kind == RBF_GRID:
        centers = np.array(d["centers"], dtype=float)
        centers.setflags(write=False)
        params = {
            "grid_shape": tuple(d["grid_shape"]),
            "bounds": np.array(d["bounds"], dtype=float),
            "width_factor": float(d["width_factor"]),
            "width": float(d["width"]),
            "centers": centers,
        }
        return Dictionary(RBF_GRID, d["input_dim"], d["output_dim"], params, sbi)
    if kind == MLP_IMPORTED:
        weights = _weights_from_layer_list(d["layers"], d["input_dim"])
        return _mlp_dictionary(weights, bool(d["include_state"]))
    if kind == COMPOSITE:
        children = tuple(from_descriptor(c) for c in d["children"])
        return concat(children)
    raise SchemaError(f"unknown dictionary kind {kind!r}")


# -- constructors ---------------------------------------------------------


def state_dictionary(n: int) -> Dictionary:
    """Identity dictionary: z(x) = x."""
    return Dictionary(STATE_ONLY, n, n, {}, state_block_index=(0, n))


def make_rbf_grid(
    grid_shape: Sequence[int],
    bounds,
    width_factor: float = 1.0,
    width: float | None = None,
) -> Dictionary:
    """State-inclusive Gaussian RBF dictionary on a uniform center grid.

    Centers form the uniform tensor grid over ``bounds`` (an (n, 2) array
    of per-dimension [lo, hi]); one-point axes center on the midpoint.
    Kernel: g(x) = exp(-||x - c||^2 / (2 sigma^2)) with sigma =
    width_factor * mean per-dimension center spacing unless ``width`` is
    given explicitly.  Observable order: state variables first, then RBFs
    in row-major center order, so m = prod(grid_shape) + n.
    """
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise DimensionMismatch(f"bounds must be (n, 2), got {bounds.shape}")
    n = bounds.shape[0]
    grid_shape = [int(s) for s in grid_shape]
    if len(grid_shape) != n:
        raise DimensionMismatch(f"grid_shape has {len(grid_shape)} entries for n={n}")
    if any(s < 1 for s in grid_shape):
        raise DegenerateBounds("grid_shape entries must be >= 1")
    sides = bounds[:, 1] - bounds[:, 0]
    if np.any(sides <= 0):
        raise DegenerateBounds(f"bounds sides must have positive length, got {sides}")

    axes = []
    spacings = []
    for (lo, hi), s in zip(bounds, grid_shape):
        if s == 1:
            axes.append(np.array([(lo + hi) / 2.0]))
            spacings.append(hi - lo)
        else:
            axes.append(np.linspace(lo, hi, s))
            spacings.append((hi - lo) / (s - 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([g.ravel() for g in mesh], axis=1)
    if width is None:
        width = width_factor * float(np.mean(spacings))
    if width <= 0:
        raise DegenerateBounds(f"RBF width must be positive, got {width}")
    centers.setflags(write=False)

    params = {
        "grid_shape": tuple(grid_shape),
        "bounds": bounds,
        "width_factor": float(width_factor),
        "width": float(width),
        "centers": centers,
    }
    m = centers.shape[0] + n
    return Dictionary(RBF_GRID, n, m, params, state_block_index=(0, n))


def _mlp_dictionary(weights: MlpWeights, include_state: bool) -> Dictionary:
    m = weights.output_dim + (weights.input_dim if include_state else 0)
    sbi = (0, weights.input_dim) if include_state else None
    params = {"weights": weights, "include_state": include_state}
    return Dictionary(MLP_IMPORTED, weights.input_dim, m, params, state_block_index=sbi)


def load_mlp_dictionary(weights: MlpWeights | str, include_state: bool | None = None) -> Dictionary:
    """Dictionary whose lift is the forward pass of a trained hidden stack.

    ``weights`` is either an :class:`MlpWeights` or a path to a weight
    file (see :func:`load_mlp_weights_file`).  With ``include_state`` the
    raw state is concatenated in front of the network outputs, mirroring
    the RBF ordering convention.
    """
    if isinstance(weights, str):
        weights, file_include_state = load_mlp_weights_file(weights)
        if include_state is None:
            include_state = file_include_state
    if include_state is None:
        include_state = False
    return _mlp_dictionary(weights, bool(include_state))


def concat(children: Sequence[Dictionary]) -> Dictionary:
    """Composite dictionary: concatenation of child observable blocks.

    The state block, if any, is taken from the first state-inclusive
    child, offset by the widths of the children before it.
    """
    children = tuple(children)
    if not children:
        raise SchemaError("composite needs at least one child")
    n = children[0].input_dim
    if any(c.input_dim != n for c in children):
        raise DimensionMismatch("composite children disagree on input_dim")
    m = sum(c.output_dim for c in children)
    sbi = None
    offset = 0
    for c in children:
        if c.state_block_index is not None:
            lo, hi = c.state_block_index
            sbi = (offset + lo, offset + hi)
            break
        offset += c.output_dim
    return Dictionary(COMPOSITE, n, m, {"children": children}, state_block_index=sbi)


# -- MLP weight file format ------------------------------------------------
#
# JSON: { "input_dim": n,
#         "layers": [ {"w": [[...]], "b": [...], "act": "relu"|"linear"} ],
#         "include_state": bool }
# Matrices are row-major nested lists, w[i][j] multiplying input j into
# output i.  When include_state is true the lifted vector is
# [x; forward(x)], state block first.


def _weights_from_layer_list(layers: list, input_dim: int) -> MlpWeights:
    if not isinstance(layers, list) or not layers:
        raise SchemaError("'layers' must be a nonempty list")
    parsed = []
    for i, layer in enumerate(layers):
        try:
            w = np.array(layer["w"], dtype=float)
            b = np.array(layer["b"], dtype=float)
            act = str(layer["act"]).lower()
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"layer {i}: {exc}") from exc
        w.setflags(write=False)
        b.setflags(write=False)
        parsed.append((w, b, act))
    out_dim = parsed[-1][0].shape[0]
    return MlpWeights(tuple(parsed), int(input_dim), int(out_dim))


def load_mlp_weights_file(path: str) -> tuple[MlpWeights, bool]:
    """Parse a weight file; returns (weights, include_state flag)."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "input_dim" not in doc or "layers" not in doc:
        raise SchemaError(f"{path}: missing 'input_dim' or 'layers'")
    weights = _weights_from_layer_list(doc["layers"], int(doc["input_dim"]))
    return weights, bool(doc.get("include_state", False))
