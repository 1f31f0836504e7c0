"""Shared fixtures: small loops with known properties."""

from itertools import permutations

import numpy as np
import pytest

from config_loader import get_settings
from services.free_loops import fp_cayley
from services.loop_core import abelian_group_loop, build_loop, exceptional_loop_8


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; tests that patch the environment need a clean cache."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def exceptional():
    return exceptional_loop_8()


@pytest.fixture
def z3():
    return abelian_group_loop((3,))


@pytest.fixture
def s3():
    """The nonabelian group of order 6, identity permutation at index 0."""
    perms = list(permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(a[b[i]] for i in range(3))] for b in perms] for a in perms]
    return build_loop(table)


@pytest.fixture
def non_automorphic_6():
    """Z6 with the intercalate on rows/columns 1 and 4 switched: commutative, not automorphic."""
    table = np.add.outer(np.arange(6), np.arange(6)) % 6
    table[1, 1], table[1, 4], table[4, 1], table[4, 4] = 5, 2, 2, 5
    return build_loop(table)


@pytest.fixture(scope="module")
def f2():
    return fp_cayley(2)
