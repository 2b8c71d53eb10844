import functools

import pytest

from zetasections.rearranger import paper_rearrangement
from zetasections.tracker import TrackerConfig, track_pair

CFG = TrackerConfig()


@functools.lru_cache(maxsize=None)
def tracked(pair, family, N_max, rearranged=None):
    """Cached trajectories; expensive runs are shared by several test modules."""
    R = paper_rearrangement(rearranged) if rearranged else None
    return track_pair(pair, family, N_max, rearrangement=R, config=CFG)


@pytest.fixture(scope="session")
def traj_88():
    return tracked((24, 25), "accelerated", 30)


@pytest.fixture(scope="session")
def traj_725():
    return tracked((725, 726), "accelerated", 566)


@pytest.fixture(scope="session")
def traj_725_rearranged():
    return tracked((725, 726), "accelerated", 566, "R_accelerated")


@pytest.fixture(scope="session")
def traj_dh_44():
    return tracked((44, 45), "dh", 200)
