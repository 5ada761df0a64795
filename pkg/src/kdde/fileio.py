"""File formats: dataset CSV, model JSON, report CSV, experiment config.

All JSON emitted here renders floats with 17 significant digits, enough
for a bit-exact decimal round-trip of IEEE doubles, and is written
without timestamps in the payload ordering so reruns diff cleanly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dictionary import from_descriptor
from .encoder import GramPair, KoopmanModel, TransitionDataset
from .errors import SchemaError
from .evaluation import EvalReport


# -- 17-significant-digit JSON ---------------------------------------------


def _render(obj, parts: list) -> None:
    if obj is None or obj is True or obj is False:
        parts.append("null" if obj is None else "true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        f = float(obj)
        if not np.isfinite(f):
            raise SchemaError(f"cannot serialize non-finite value {f}")
        parts.append(format(f, ".17g"))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(k)))
            parts.append(":")
            _render(v, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        parts.append("[")
        for i, v in enumerate(seq):
            if i:
                parts.append(",")
            _render(v, parts)
        parts.append("]")
    else:
        raise SchemaError(f"cannot serialize {type(obj).__name__}")


def dumps_17g(obj) -> str:
    parts: list = []
    _render(obj, parts)
    return "".join(parts)


def dump_17g(obj, path) -> None:
    Path(path).write_text(dumps_17g(obj) + "\n")


# -- dataset CSV + provenance sidecar ---------------------------------------


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def save_dataset(data: TransitionDataset, path) -> None:
    """CSV with header x1..xn,y1..yn plus a provenance JSON sidecar."""
    path = Path(path)
    n = data.dim
    header = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for x, y in zip(data.x, data.x_next):
            writer.writerow(
                [format(v, ".17g") for v in x] + [format(v, ".17g") for v in y]
            )
    dump_17g(data.provenance, sidecar_path(path))


def load_dataset(path) -> TransitionDataset:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) % 2 != 0 or not header[0].startswith("x"):
            raise SchemaError(f"{path}: expected header x1..xn,y1..yn")
        n = len(header) // 2
        rows = np.array([[float(v) for v in row] for row in reader])
    if rows.size == 0:
        rows = rows.reshape(0, 2 * n)
    provenance = {}
    side = sidecar_path(path)
    if side.exists():
        provenance = json.loads(side.read_text())
    return TransitionDataset.from_pairs(rows[:, :n], rows[:, n:], provenance)


def save_states(X: np.ndarray, path) -> None:
    """CSV of bare states with header x1..xn (lift/debug input format)."""
    X = np.asarray(X, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(X.shape[1])])
        for row in X:
            writer.writerow([format(v, ".17g") for v in row])


def load_states(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return np.array([[float(v) for v in row] for row in reader])


# -- model JSON --------------------------------------------------------------


def save_model(model: KoopmanModel, path) -> None:
    meta = dict(model.meta)
    cond = meta.get("condition_estimate")
    if cond is not None and not np.isfinite(cond):
        meta["condition_estimate"] = None  # singular gram, solved with a ridge
    doc = {
        "method": model.method,
        "dict": model.dictionary.to_descriptor(),
        "A": model.A,
        "meta": meta,
    }
    if model.grams is not None:
        doc["grams"] = {
            "R": model.grams.R,
            "Q": model.grams.Q,
            "condition_estimate": model.grams.condition_estimate
            if np.isfinite(model.grams.condition_estimate)
            else None,
            "node_count": model.grams.node_count,
            "hull_volume": model.grams.hull_volume,
        }
    dump_17g(doc, path)


def load_model(path) -> KoopmanModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    for key in ("method", "dict", "A"):
        if key not in doc:
            raise SchemaError(f"{path}: missing {key!r}")
    dictionary = from_descriptor(doc["dict"])
    A = np.array(doc["A"], dtype=float)
    grams = None
    if "grams" in doc:
        g = doc["grams"]
        cond = g.get("condition_estimate")
        grams = GramPair(
            np.array(g["R"], dtype=float),
            np.array(g["Q"], dtype=float),
            float(cond) if cond is not None else float("inf"),
            int(g["node_count"]),
            float(g["hull_volume"]),
        )
    return KoopmanModel(dictionary, A, doc["method"], grams, doc.get("meta", {}))


# -- evaluation report --------------------------------------------------------


def save_report(report: EvalReport, path) -> None:
    """Grid CSV of per-cell SSE (NaN outside the range) + JSON sidecar."""
    path = Path(path)
    np.savetxt(path, report.sse, delimiter=",", fmt="%.17g")
    meta = dict(report.meta)
    meta.update(
        {
            "grid_shape": list(report.grid_shape),
            "total_sse": report.total_sse,
            "sse_variance": report.sse_variance,
            "masked_cells": int(report.mask.sum()),
        }
    )
    dump_17g(meta, sidecar_path(path))


# -- experiment config ---------------------------------------------------------

_CONFIG_KEYS = {
    "dataset",
    "dictionary",
    "methods",
    "ridge",
    "rcond",
    "eval_grid",
    "output_dir",
    "seed",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One reproducible experiment: dataset, dictionary, methods, outputs."""

    dataset: dict
    dictionary: str = "rbf:5x5"
    methods: tuple[str, ...] = ("edmd", "dde")
    ridge: float = 0.0
    rcond: float = 1e-12
    eval_grid: tuple[int, int] = (100, 100)
    output_dir: str = "."
    seed: int = 0

    def to_json(self) -> str:
        return dumps_17g(
            {
                "dataset": self.dataset,
                "dictionary": self.dictionary,
                "methods": list(self.methods),
                "ridge": self.ridge,
                "rcond": self.rcond,
                "eval_grid": list(self.eval_grid),
                "output_dir": self.output_dir,
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config is not valid JSON ({exc})") from exc
        if not isinstance(doc, dict):
            raise SchemaError("config must be a JSON object")
        unknown = set(doc) - _CONFIG_KEYS
        if unknown:
            raise SchemaError(f"unknown config keys: {sorted(unknown)}")
        if "dataset" not in doc:
            raise SchemaError("config requires a 'dataset' block")
        kwargs = dict(doc)
        if "methods" in kwargs:
            kwargs["methods"] = tuple(kwargs["methods"])
        if "eval_grid" in kwargs:
            kwargs["eval_grid"] = tuple(kwargs["eval_grid"])
        return cls(**kwargs)
