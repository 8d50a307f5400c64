import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lcris.channel import wavelength
from lcris.geometry import ArraySpec, Plane, Position3D, sample_area, upa_coordinates, upa_positions

ORIGIN = Position3D(0.0, 0.0, 0.0)


def test_single_element_is_center():
    c = Position3D(1.0, -2.0, 3.0)
    assert upa_positions(ArraySpec(1, 1, 0.7, c)) == [c]


def test_2x2_yz_symmetry():
    d = 0.01
    pts = {tuple(np.round(p.as_array(), 12)) for p in upa_positions(ArraySpec(2, 2, d, ORIGIN, Plane.YZ))}
    assert pts == {(0.0, sy * d / 2, sz * d / 2) for sy in (-1, 1) for sz in (-1, 1)}


def test_ris_10x10_half_wavelength_span():
    d = wavelength(28e9) / 2
    assert d == pytest.approx(5.3534e-3, rel=1e-3)
    xyz = upa_coordinates(ArraySpec(10, 10, d, ORIGIN, Plane.YZ))
    assert len(xyz) == 100
    assert np.ptp(xyz[:, 1]) == pytest.approx(9 * d)
    assert np.ptp(xyz[:, 2]) == pytest.approx(9 * d)
    assert np.ptp(xyz[:, 1]) == pytest.approx(48.18e-3, abs=0.05e-3)
    assert np.all(xyz[:, 0] == 0)


def test_row_major_order():
    xyz = upa_coordinates(ArraySpec(2, 3, 1.0, ORIGIN, Plane.YZ))
    # columns along y vary fastest
    assert np.allclose(xyz[:3, 1], [-1, 0, 1])
    assert np.allclose(xyz[:3, 2], -0.5)
    assert np.allclose(xyz[3:, 2], 0.5)


@pytest.mark.parametrize("bad", [dict(rows=0, cols=1, spacing=1.0), dict(rows=1, cols=1, spacing=0.0)])
def test_array_spec_validation(bad):
    with pytest.raises(ValueError):
        ArraySpec(**bad)


@given(rows=st.integers(1, 6), cols=st.integers(1, 6), spacing=st.floats(1e-3, 1.0),
       plane=st.sampled_from(list(Plane)))
def test_upa_invariants(rows, cols, spacing, plane):
    xyz = upa_coordinates(ArraySpec(rows, cols, spacing, Position3D(1, 2, 3), plane))
    assert len(xyz) == rows * cols
    assert np.allclose(xyz.mean(axis=0), [1, 2, 3])
    if rows * cols > 1:
        dist = np.linalg.norm(xyz[:, None] - xyz[None], axis=-1)
        np.fill_diagonal(dist, np.inf)
        assert dist.min() > 0
        assert np.allclose(dist.min(axis=1), spacing)


def test_area_radius_zero_is_center():
    c = Position3D(10, 0, -5)
    assert sample_area(c, 0.0, 0.5).points == (c,)


def test_area_small_radius_only_center():
    c = Position3D(10, 0, -5)
    assert sample_area(c, 0.4, 0.5).points == (c,)


def test_area_count_matches_enumeration():
    c = Position3D(10, 0, -5)
    area = sample_area(c, 1.0, 0.5)
    # brute force over a generous box of 0.5 m grid offsets
    expected = {(i * 0.5, j * 0.5) for i, j in itertools.product(range(-10, 11), repeat=2)
                if (i * 0.5) ** 2 + (j * 0.5) ** 2 <= 1.0 + 1e-12}
    assert len(expected) == 13
    got = {(round(p.x - 10, 9), round(p.y, 9)) for p in area.points}
    assert got == expected
    assert area.points[0] == c
    assert all(p.z == -5 for p in area.points)


@given(radius=st.floats(0, 3), res=st.floats(0.1, 1.0), shrink=st.floats(0, 1))
def test_area_invariants(radius, res, shrink):
    c = Position3D(10, 1, -5)
    area = sample_area(c, radius, res)
    assert area.points[0] == c
    assert len(set(area.points)) == len(area.points)
    assert all(p.distance(c) <= radius * (1 + 1e-9) for p in area.points)
    assert sample_area(c, radius, res) == area
    assert set(sample_area(c, radius * shrink, res).points) <= set(area.points)


def test_area_validation():
    with pytest.raises(ValueError):
        sample_area(ORIGIN, -1.0, 0.5)
    with pytest.raises(ValueError):
        sample_area(ORIGIN, 1.0, 0.0)


def test_position_rejects_nonfinite():
    with pytest.raises(ValueError):
        Position3D(math.nan, 0, 0)
