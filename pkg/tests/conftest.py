import functools

import pytest

from rellab.ground_state import SolveOptions, default_grid, minimize_quotient
from rellab.params import char_roots


@functools.lru_cache(maxsize=None)
def cached_ground_state(A: float, B: float, q: float, M: int = 4097):
    c = char_roots(A, B, q)
    return minimize_quotient(c, default_grid(c, M), SolveOptions())


@pytest.fixture
def ground_state():
    return cached_ground_state
