from pathlib import Path

import numpy as np
import pytest

from permsurv import TwoArmDataset, read_dataset

DATA = Path(__file__).parent / "data"
TOY_CSV = DATA / "toy.csv"


@pytest.fixture
def toy():
    return read_dataset(TOY_CSV)


def random_dataset(rng, n=None, ties=False, cens=0.3):
    """Random two-arm dataset with both arms present and at least one event."""
    n = int(rng.integers(10, 301)) if n is None else n
    while True:
        if ties:
            time = rng.integers(0, max(3, n // 4), n).astype(float)
        else:
            time = rng.exponential(10.0, n)
        event = rng.random(n) > cens
        arm = rng.integers(0, 2, n)
        if 0 < arm.sum() < n and event.any():
            return TwoArmDataset(time, event, arm)
