import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import browniandisk as bd


@pytest.fixture(scope="session")
def complex_battery():
    """Fifty disk complexes with >= 2000 contour entries plus their metrics.

    Shared by the structural acceptance checks and the heavier unit tests;
    each complex carries an all-pairs metric over 256 sampled points
    (root included).
    """
    out = []
    for i in range(50):
        rng = bd.RandomStream(90210, i)
        cx = bd.sample_disk_complex(epsilon=0.05, bridge_step=5e-4, rng=rng)
        n = len(cx.contour)
        assert n >= 2000
        picker = np.random.default_rng(i)
        pts = np.unique(
            np.concatenate(
                [
                    [cx.root_index],
                    picker.choice(n, size=255, replace=False),
                ]
            )
        )
        ma = bd.metric_shortest_path(cx.contour, pts)
        out.append((cx, ma))
    return out
