import random
from pathlib import Path

import numpy as np
import pytest

from lkgain import Instance, Tour, WeightKind, parse_tsplib

DATA = Path(__file__).parent / "data"

START_ORDER = [1, 4, 3, 2, 5, 6]  # ring with both long diagonals, cost 24
OPTIMAL_ORDER = [1, 2, 3, 4, 5, 6]  # outer ring, cost 20


@pytest.fixture(scope="session")
def hexagon() -> Instance:
    return parse_tsplib((DATA / "hexagon.tsp").read_text())


@pytest.fixture()
def hexagon_start(hexagon) -> Tour:
    return Tour(hexagon, START_ORDER)


def random_euc_instance(n: int, seed: int, box: float = 1000.0) -> Instance:
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, box, size=(n, 2))
    return Instance(f"euc{n}s{seed}", n, WeightKind.EUC_2D, coords=coords)


def random_tour(inst: Instance, seed: int) -> Tour:
    order = list(range(1, inst.dimension + 1))
    random.Random(seed).shuffle(order)
    return Tour(inst, order)
