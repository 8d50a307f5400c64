import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcris.oracle import MAX_GRID_POINTS, GridSearchSpec, brute_force_phases, co_phasing_bound
from lcris.phase_opt import SnrQuadratic
from tests.conftest import crandn

TWO_PI = 2 * math.pi


def _qd(v, scale=1.0):
    return SnrQuadratic(scale * np.outer(v, v.conj()))


def test_single_element_picks_nearest_grid_phase():
    v = np.array([0.6 * np.exp(1j * 1.0)])
    phases, alpha = brute_force_phases([_qd(v)], GridSearchSpec(8, TWO_PI, 1))
    assert alpha == pytest.approx(0.36, rel=1e-12)


def test_three_elements_within_quantization(rng):
    for _ in range(5):
        v = crandn(rng, 3)
        _, alpha = brute_force_phases([_qd(v)], GridSearchSpec(16, TWO_PI, 3))
        bound = co_phasing_bound(v)
        # 16 levels over the closed circle: worst per-element error is half a step
        step = TWO_PI / 15
        assert bound * math.cos(step / 2) ** 2 <= alpha <= bound * (1 + 1e-12)


def test_zero_quadratics_give_zero():
    zero = SnrQuadratic(np.zeros((3, 3)))
    _, alpha = brute_force_phases([zero, zero], GridSearchSpec(5, math.pi, 3))
    assert alpha == 0.0


def test_cophasing_examples():
    assert co_phasing_bound(np.array([1, 1])) == pytest.approx(4.0)
    assert co_phasing_bound(np.array([1, 1j])) == pytest.approx(4.0)
    assert co_phasing_bound(np.array([1, 1j]), 2.0, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        co_phasing_bound(np.zeros(2))


def test_cophasing_against_fine_grid(rng):
    # 64 levels at N=5 is 1.07e9 points, past the guard; N=4 with 48 levels fits
    with pytest.raises(ValueError):
        GridSearchSpec(64, TWO_PI, 5)
    v = crandn(rng, 4)
    _, alpha = brute_force_phases([_qd(v)], GridSearchSpec(48, TWO_PI, 4))
    assert alpha == pytest.approx(co_phasing_bound(v), rel=1e-2)


def test_guard_and_levels():
    with pytest.raises(ValueError):
        GridSearchSpec(1, 1.0, 2)
    assert GridSearchSpec(10, 1.0, 7).levels ** 7 <= MAX_GRID_POINTS
    np.testing.assert_allclose(GridSearchSpec(3, 2.0, 1).grid(), [0, 1, 2])


def test_returned_phases_reproduce_value(rng):
    qds = [_qd(crandn(rng, 3)) for _ in range(3)]
    phases, alpha = brute_force_phases(qds, GridSearchSpec(9, 2.5, 3))
    s = np.exp(1j * phases)
    assert min(float(q.value(s)) for q in qds) == pytest.approx(alpha, rel=1e-12)
    assert np.all((phases >= 0) & (phases <= 2.5 + 1e-12))


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.floats(0.1, TWO_PI))
def test_refinement_never_hurts(seed, levels, omega):
    rng = np.random.default_rng(seed)
    qds = [_qd(crandn(rng, 3)) for _ in range(2)]
    coarse = brute_force_phases(qds, GridSearchSpec(levels, omega, 3))[1]
    fine = brute_force_phases(qds, GridSearchSpec(2 * levels - 1, omega, 3))[1]
    assert fine >= coarse * (1 - 1e-12)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_brute_force_below_bound(seed, levels):
    rng = np.random.default_rng(seed)
    v = crandn(rng, 3)
    assert brute_force_phases([_qd(v)], GridSearchSpec(levels, TWO_PI, 3))[1] <= co_phasing_bound(v) * (1 + 1e-12)
