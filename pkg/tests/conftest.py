"""Shared generators for random definite pairs and interior tetrads."""

import numpy as np
import pytest

from ncho import from_tetrad, validate_pair


def _random_pd(rng, complex_entries):
    g = rng.standard_normal((2, 2))
    if complex_entries:
        g = g + 1j * rng.standard_normal((2, 2))
    # GG^H + margin keeps the conditioning moderate
    return g @ g.conj().T + 0.3 * np.eye(2)


@pytest.fixture
def make_pair():
    def make(rng, complex_entries=False):
        return validate_pair(_random_pd(rng, complex_entries),
                             _random_pd(rng, complex_entries))
    return make


@pytest.fixture
def make_interior():
    def make(rng):
        b = 1.0 + rng.uniform(0.2, 9.0)
        a = rng.uniform(0.3, 4.0)
        c = rng.uniform(0.3, 4.0)
        xi = rng.uniform(0.05, 0.95) * np.sqrt(a * c)
        return from_tetrad(b, a, c, xi)
    return make
