"""Least-squares baseline: extended DMD over the same lifted data.

Minimizes sum_t ||z_next_t - A z_t||^2 with an SVD-based pseudoinverse,
A = Z' Z^T (Z Z^T)^+, weighting every sample equally.  Serves as the
head-to-head comparison for the volume-weighted encoder.
"""

from __future__ import annotations

import time

import numpy as np

from .dictionary import Dictionary
from .encoder import KoopmanModel, TransitionDataset
from .errors import DimensionMismatch, EmptyDataset


def fit_edmd(
    data: TransitionDataset, dictionary: Dictionary, rcond: float = 1e-12
) -> KoopmanModel:
    """Unweighted least-squares fit of the lifted transition matrix.

    ``rcond`` is the relative singular-value cutoff of the pseudoinverse;
    with fewer samples than observables the result is the
    minimum-Frobenius-norm minimizer (pseudoinverse contract).
    """
    if len(data) == 0:
        raise EmptyDataset("cannot fit on an empty dataset")
    if dictionary.input_dim != data.dim:
        raise DimensionMismatch(
            f"dictionary expects n={dictionary.input_dim}, data has n={data.dim}"
        )
    Z = dictionary.lift_batch(data.x)
    Zf = dictionary.lift_batch(data.x_next)
    G = Z.T @ Z
    G = 0.5 * (G + G.T)
    C = Zf.T @ Z
    A = C @ np.linalg.pinv(G, rcond=rcond, hermitian=True)
    A.setflags(write=False)
    meta = {
        "provenance": dict(data.provenance),
        "n_samples": len(data),
        "rcond": float(rcond),
        "fit_time": time.time(),
    }
    return KoopmanModel(dictionary, A, "edmd", None, meta)
