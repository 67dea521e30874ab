"""Comparison-tensor generation from true distances or measured signal proxies."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import ComparisonTensor, DistanceMatrix, InputError, _frozen


class SliceCoverageWarning(UserWarning):
    """More than half of a slice's comparisons are missing."""


@dataclass(frozen=True)
class ComparisonNoiseModel:
    """Gaussian comparison noise, one draw per unordered pair per slice."""

    sigma: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise InputError(f"sigma must be nonnegative, got {self.sigma}")


@dataclass(frozen=True)
class SignalMatrix:
    """Measured link proxies (power, time of flight) for all sensor pairs.

    ``increasing_with_distance`` declares the orientation: True for
    time-of-flight-like proxies, False for received power.  Missing links
    (including the diagonal) are flagged in ``missing``.
    """

    values: np.ndarray
    increasing_with_distance: bool
    n_anchors: int
    missing: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InputError(f"signal matrix must be square, got shape {v.shape}")
        n = v.shape[0]
        if self.missing is None:
            miss = np.zeros((n, n), dtype=bool)
        else:
            miss = np.array(self.missing, dtype=bool)
            if miss.shape != v.shape:
                raise InputError("missing mask shape must match values")
        np.fill_diagonal(miss, True)
        both = ~miss & ~miss.T
        if not np.allclose(np.where(both, v, 0.0), np.where(both, v.T, 0.0)):
            raise InputError("signal matrix must be symmetric where present")
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "missing", _frozen(miss, dtype=bool))

    @property
    def order(self) -> int:
        return self.values.shape[0]


def compare_ordinal(d: float, d_prime: float, xi: float) -> int:
    """Thresholded comparison sgn(d - d' + xi); 0 only on an exact tie."""
    return int(np.sign(d - d_prime + xi))


def _antisymmetric_noise(n, sigma, rng):
    """(n, n, n) noise with xi[k, i, j] = -xi[k, j, i], zero diagonal."""
    xi = np.zeros((n, n, n))
    if sigma > 0:
        iu, ju = np.triu_indices(n, k=1)
        draws = rng.standard_normal((n, iu.size)) * sigma
        xi[:, iu, ju] = draws
        xi[:, ju, iu] = -draws
    return xi


def tensor_from_distances(
    D: DistanceMatrix,
    noise: ComparisonNoiseModel,
    rng: np.random.Generator | None = None,
) -> ComparisonTensor:
    """Ordinal comparisons of true distances under threshold noise.

    For every reference sensor k and unordered pair {i, j}, one noise value
    is drawn and negated for the mirrored entry, so each slice is exactly
    skew-symmetric.
    """
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    n = D.order
    dk = D.values.T  # dk[k, i] = distance from sensor i to reference k
    xi = _antisymmetric_noise(n, noise.sigma, rng)
    z = np.sign(dk[:, :, None] - dk[:, None, :] + xi)
    return ComparisonTensor(z, D.n_anchors)


def tensor_from_signals(S: SignalMatrix) -> ComparisonTensor:
    """Ordinal comparisons of measured proxies.

    Entries are oriented so +1 always means "i is farther from k than j"
    regardless of whether the proxy grows or shrinks with distance.
    Comparisons touching a missing link yield 0.
    """
    p = S.values if S.increasing_with_distance else -S.values
    pk = p.T
    missk = S.missing.T
    z = np.sign(pk[:, :, None] - pk[:, None, :])
    unusable = missk[:, :, None] | missk[:, None, :]
    z[unusable] = 0
    n = S.order
    if n > 1:
        off_diag = ~np.eye(n, dtype=bool)
        missing_frac = (unusable & off_diag).sum(axis=(1, 2)) / (n * (n - 1))
        for k in np.nonzero(missing_frac > 0.5)[0]:
            warnings.warn(
                f"slice {k}: {missing_frac[k]:.0%} of comparisons missing; "
                "localization quality degrades",
                SliceCoverageWarning,
                stacklevel=2,
            )
    return ComparisonTensor(z, S.n_anchors)
