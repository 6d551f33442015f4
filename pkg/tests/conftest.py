import random

import pytest

from treerank.graph import Digraph

ALPHA = 0.85


@pytest.fixture
def rng():
    return random.Random(20240601)


def chain_with_back_arc():
    """r <- u <- v plus u -> v; ids r=0, u=1, v=2."""
    return Digraph(3, [(1, 0), (2, 1), (1, 2)])
