import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gidalign.geometry import (
    Center,
    image_center,
    pixel_angle,
    weighted_circular_mean,
    wrap_angle,
)
from oracles import circular_mean_mp

angles = st.floats(-50.0, 50.0, allow_nan=False)
finite_weights = st.floats(0.0, 1.0, allow_nan=False)


@pytest.mark.parametrize("h, w, expected", [
    (3, 3, (1.0, 1.0)),
    (32, 32, (15.5, 15.5)),
    (28, 46, (13.5, 22.5)),
])
def test_image_center(h, w, expected):
    assert image_center(h, w) == Center(*expected)


@pytest.mark.parametrize("h, w", [(0, 3), (3, 0), (-1, 5), (2.5, 2)])
def test_image_center_rejects_bad_dims(h, w):
    with pytest.raises(ValueError):
        image_center(h, w)


@pytest.mark.parametrize("row, col, expected", [
    (0, 1, 0.0),
    (1, 0, math.pi / 2),
    (-1.5, -1.5, -3 * math.pi / 4),
    (0, 0, 0.0),
    (0, -1, -math.pi),  # atan2 gives +pi; the half-open range maps it to -pi
])
def test_pixel_angle(row, col, expected):
    assert pixel_angle(row, col) == pytest.approx(expected, abs=1e-15)


@given(angles)
def test_wrap_range(a):
    r = wrap_angle(a)
    assert -math.pi <= r < math.pi
    assert math.isclose(math.cos(r), math.cos(a), abs_tol=1e-9)
    assert math.isclose(math.sin(r), math.sin(a), abs_tol=1e-9)


@given(st.floats(-math.pi, math.pi, exclude_max=True))
def test_wrap_full_turn(a):
    assert wrap_angle(a) == a
    assert abs(wrap_angle(a + 2 * math.pi) - a) < 1e-12 or \
        abs(abs(wrap_angle(a + 2 * math.pi) - a) - 2 * math.pi) < 1e-12


def test_wrap_array_matches_scalar():
    a = np.array([-7.0, -math.pi, 0.0, math.pi, 3.5, 12.0])
    assert np.allclose(wrap_angle(a), [wrap_angle(float(x)) for x in a], atol=0)


def test_mean_single_term():
    e = weighted_circular_mean([1.0], [math.pi / 3])
    assert e.angle == pytest.approx(math.pi / 3, abs=1e-15)
    assert e.magnitude == pytest.approx(1.0)
    assert not e.degenerate


def test_mean_exact_cancellation():
    e = weighted_circular_mean([1.0, 1.0], [math.pi / 2, -math.pi / 2])
    assert e.degenerate
    assert e.angle == 0.0
    assert e.magnitude == pytest.approx(0.0, abs=1e-15)


def test_mean_two_terms_against_mp_oracle():
    w, t = [0.5, 1.0], [-3 * math.pi / 4, math.pi / 4]
    ref_angle, ref_mag = circular_mean_mp(w, t)
    # the oracle itself lands on pi/4 and 0.5
    assert ref_angle == pytest.approx(math.pi / 4, abs=1e-15)
    assert ref_mag == pytest.approx(0.5, abs=1e-15)
    e = weighted_circular_mean(w, t)
    assert e.angle == pytest.approx(ref_angle, abs=1e-14)
    assert e.magnitude == pytest.approx(ref_mag, abs=1e-14)


def test_mean_length_mismatch():
    with pytest.raises(ValueError):
        weighted_circular_mean([1.0, 2.0], [0.0])


def test_mean_rejects_negative_weights():
    with pytest.raises(ValueError):
        weighted_circular_mean([-1.0], [0.0])


def test_all_zero_weights_degenerate():
    e = weighted_circular_mean([0.0, 0.0], [0.3, 1.0])
    assert e.degenerate and e.angle == 0.0


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(0.01, 1.0), angles), min_size=1, max_size=30),
       st.floats(1e-3, 1e3))
def test_positive_scale_invariance(pairs, k):
    w = np.array([p[0] for p in pairs])
    t = np.array([p[1] for p in pairs])
    e1 = weighted_circular_mean(w, t)
    e2 = weighted_circular_mean(k * w, t)
    if not e1.degenerate:
        assert e2.angle == e1.angle


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(0.01, 1.0), angles), min_size=1, max_size=30),
       st.floats(-math.pi, math.pi))
def test_rotation_equivariance(pairs, delta):
    w = np.array([p[0] for p in pairs])
    t = np.array([p[1] for p in pairs])
    e1 = weighted_circular_mean(w, t)
    e2 = weighted_circular_mean(w, t + delta)
    # tiny resultants make the angle ill-conditioned
    if e1.magnitude > 1e-3 * w.sum():
        diff = wrap_angle(e2.angle - e1.angle - delta)
        assert abs(diff) < 1e-9 or abs(abs(diff) - 2 * math.pi) < 1e-9


@settings(max_examples=100)
@given(st.lists(st.tuples(st.floats(0.01, 1.0), angles), min_size=2, max_size=30),
       st.randoms(use_true_random=False))
def test_permutation_invariance(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    a = weighted_circular_mean([p[0] for p in pairs], [p[1] for p in pairs])
    b = weighted_circular_mean([p[0] for p in shuffled], [p[1] for p in shuffled])
    assert b.magnitude == pytest.approx(a.magnitude, rel=1e-12, abs=1e-12)
    if a.magnitude > 1e-3:
        assert abs(wrap_angle(b.angle - a.angle)) < 1e-9


@given(st.lists(st.tuples(finite_weights, angles), min_size=1, max_size=30))
def test_magnitude_triangle_inequality(pairs):
    w = [p[0] for p in pairs]
    e = weighted_circular_mean(w, [p[1] for p in pairs])
    assert e.magnitude <= sum(w) * (1 + 1e-12) + 1e-15
    if e.degenerate:
        assert e.angle == 0.0
