import math

import pytest
from hypothesis import given, strategies as st

from lcris.channel import SPEED_OF_LIGHT
from lcris.lc_loss import (LcPhaseShifterSpec, element_amplitude, insertion_loss_db, max_phase_shift,
                           max_phase_shift_physical)

TWO_PI = 2 * math.pi


def test_physical_full_range():
    lam = SPEED_OF_LIGHT / 28e9
    l = lam / 0.3
    assert l == pytest.approx(35.69e-3, rel=1e-3)
    assert max_phase_shift_physical(l, 0.3, 28e9) == pytest.approx(TWO_PI, rel=1e-12)
    assert max_phase_shift_physical(0.0, 0.3, 28e9) == 0.0
    assert max_phase_shift_physical(l / 2, 0.3, 28e9) == pytest.approx(math.pi, rel=1e-12)


def test_relative_length():
    assert max_phase_shift(0.02, 0.02) == TWO_PI
    assert max_phase_shift(0.01, 0.02) == pytest.approx(math.pi, rel=1e-15)
    assert max_phase_shift(0.0, 0.02) == 0.0
    with pytest.raises(ValueError):
        max_phase_shift(0.03, 0.02)


def test_insertion_loss_anchors():
    assert abs(insertion_loss_db(TWO_PI, 75.0) - 4.8) <= 1e-12
    assert abs(insertion_loss_db(math.pi, 75.0) - 2.4) <= 1e-12
    assert insertion_loss_db(0.0, 75.0) == 0.0


def test_amplitude_anchors():
    assert element_amplitude(0.0) == 1.0
    assert element_amplitude(4.8) ** 2 == pytest.approx(0.3311, abs=1e-4)
    assert element_amplitude(3.0) ** 2 == pytest.approx(0.5012, abs=1e-4)
    with pytest.raises(ValueError):
        element_amplitude(-1.0)


@given(frac=st.floats(0.01, 1.0), fom=st.floats(1.0, 500.0))
def test_fom_identity(frac, fom):
    spec = LcPhaseShifterSpec(length=frac * 0.02, ref_length=0.02, fom_deg_per_db=fom)
    assert math.degrees(spec.omega_max) / spec.insertion_loss_db == pytest.approx(fom, rel=1e-12)


@given(a=st.floats(0, 1), b=st.floats(0, 1), fom=st.floats(1.0, 500.0))
def test_loss_linear_in_length(a, b, fom):
    lr = 0.02
    la, lb = a * lr, b * lr
    slope = (360 / fom) / lr
    diff = insertion_loss_db(max_phase_shift(la, lr), fom) - insertion_loss_db(max_phase_shift(lb, lr), fom)
    assert diff == pytest.approx(slope * (la - lb), abs=1e-9)


@given(x=st.one_of(st.just(0.0), st.floats(1e-9, 50)), dx=st.floats(1e-6, 10))
def test_amplitude_monotone(x, dx):
    assert element_amplitude(x + dx) < element_amplitude(x) <= 1.0
    assert (element_amplitude(x) == 1.0) == (x == 0.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        LcPhaseShifterSpec(length=0.03, ref_length=0.02)
    with pytest.raises(ValueError):
        LcPhaseShifterSpec(length=0.01, ref_length=0.02, fom_deg_per_db=0.0)
