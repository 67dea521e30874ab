import numpy as np
import pytest

from ordinal_unloc.core import DistanceMatrix, IllPosedWarning


@pytest.fixture(autouse=True)
def _quiet_ill_posed(recwarn):
    # small synthetic fields trip the anchor-count warning constantly
    import warnings

    warnings.simplefilter("always")
    warnings.filterwarnings("ignore", category=IllPosedWarning)
    yield


def random_field_distances(rng, m, n, side=1.0):
    """Random anchors/targets in a square plus the exact distance matrix."""
    anchors = rng.uniform(0, side, size=(m, 2))
    targets = rng.uniform(0, side, size=(n, 2))
    points = np.vstack([anchors, targets])
    diff = points[:, None, :] - points[None, :, :]
    d = np.sqrt((diff**2).sum(axis=-1))
    np.fill_diagonal(d, 0.0)
    return anchors, targets, DistanceMatrix(d, m)
