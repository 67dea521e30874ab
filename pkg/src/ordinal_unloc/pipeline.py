"""End-to-end composition: comparison tensor -> proximities -> distances
-> positions.  Shared by the benchmark harness, the ingest workflow and
the CLI."""

from __future__ import annotations

import numpy as np

from .funclearn import EstimatedDistanceMatrix, estimate_distances
from .rank import aggregate_proximities
from .unfold import LocalizationResult, SolverOptions, localize_all


def anchor_distance_block(anchors: np.ndarray) -> np.ndarray:
    """Anchor-to-anchor distances from known coordinates."""
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    diff = anchors[:, None, :] - anchors[None, :, :]
    d = np.sqrt((diff**2).sum(axis=-1))
    np.fill_diagonal(d, 0.0)
    return d


def localize_from_tensor(
    tensor,
    anchors: np.ndarray,
    opts: SolverOptions | None = None,
) -> tuple[list[LocalizationResult | None], EstimatedDistanceMatrix]:
    """Run rank aggregation, function learning and unfolding on a tensor.

    Returns the per-target solver results and the recalibrated
    anchor-to-target distance estimates.
    """
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    psi = aggregate_proximities(tensor)
    d_y = anchor_distance_block(anchors)
    d_hat = estimate_distances(psi, d_y)
    results = localize_all(anchors, d_hat, opts)
    return results, d_hat
