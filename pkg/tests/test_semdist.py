"""Cosine-distance anchors, scale invariance, and validation errors."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semetrics import sem_dist


def test_identical_vectors():
    v = np.array([0.3, -1.2, 4.0])
    assert sem_dist(v, v) == pytest.approx(0.0, abs=1e-12)


def test_orthogonal_unit_vectors():
    assert sem_dist([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)


def test_antipodal_vectors():
    v = np.array([2.0, -0.5, 0.25])
    assert sem_dist(v, -v) == pytest.approx(2.0, abs=1e-12)


def test_scale_invariance_random():
    rng = np.random.default_rng(11)
    x = rng.normal(size=16)
    y = rng.normal(size=16)
    base = sem_dist(x, y)
    for _ in range(100):
        a, b = rng.uniform(1e-3, 1e3, size=2)
        assert sem_dist(a * x, b * y) == pytest.approx(base, abs=1e-9)


def test_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.normal(size=8)
        y = rng.normal(size=8)
        assert sem_dist(x, y) == pytest.approx(sem_dist(y, x), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=16),
       st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=16))
def test_range_property(xs, ys):
    size = min(len(xs), len(ys))
    x = np.array(xs[:size])
    y = np.array(ys[:size])
    if not x.any() or not y.any():
        with pytest.raises(ValueError):
            sem_dist(x, y)
        return
    assert -1e-9 <= sem_dist(x, y) <= 2.0 + 1e-9


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="mismatch"):
        sem_dist([1.0, 0.0], [1.0, 0.0, 0.0])


def test_zero_vector_rejected():
    with pytest.raises(ValueError, match="zero"):
        sem_dist([0.0, 0.0], [1.0, 0.0])


def test_non_finite_rejected():
    with pytest.raises(ValueError, match="finite"):
        sem_dist([np.nan, 1.0], [1.0, 0.0])


def test_matrix_input_rejected():
    with pytest.raises(ValueError, match="1-D"):
        sem_dist(np.ones((2, 2)), np.ones((2, 2)))
