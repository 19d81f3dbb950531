import numpy as np
import pytest

from gamesight.errors import InvalidGeometry
from gamesight.geometry import ScreenProfile, ViewingSample, arcmin_to_px, px_to_arcmin

SMALL_ANGLE_ARCMIN_PER_RAD = 3437.75


def test_zero_size_is_zero_angle(screen):
    assert px_to_arcmin(0.0, screen, 600.0) == 0.0


def test_worked_example_100px(screen):
    # small-angle oracle: (25 mm / 600 mm) * 3437.75 = 143.24'
    exact = px_to_arcmin(100.0, screen, 600.0)
    small = (100.0 * 0.25 / 600.0) * SMALL_ANGLE_ARCMIN_PER_RAD
    assert exact == pytest.approx(143.22, abs=0.01)
    assert abs(exact - small) / exact < 1e-3


def test_inverse_worked_examples(screen):
    assert arcmin_to_px(0.0, screen, 600.0) == 0.0
    assert arcmin_to_px(143.22, screen, 600.0) == pytest.approx(100.0, abs=1e-2)
    # 2 arcmin at 600 mm: (2 / 3437.75) * 600 / 0.25
    assert arcmin_to_px(2.0, screen, 600.0) == pytest.approx(1.396, abs=1e-3)


def test_round_trip_examples(screen):
    for px in (1.0, 10.0, 500.0):
        angle = px_to_arcmin(px, screen, 600.0)
        assert arcmin_to_px(angle, screen, 600.0) == pytest.approx(px, rel=1e-9)


def test_round_trip_grid(screen):
    sizes = np.geomspace(0.1, 1800.0, 32)
    distances = np.geomspace(100.0, 3000.0, 32)
    checked = 0
    for s in sizes:
        for d in distances:
            angle = px_to_arcmin(float(s), screen, float(d))
            if angle >= 90.0 * 60.0:  # outside the inverse's domain
                continue
            back = arcmin_to_px(angle, screen, float(d))
            assert abs(back - s) <= 1e-9 * s
            checked += 1
    assert checked >= 1000


def test_monotonicity(screen):
    angles = [px_to_arcmin(s, screen, 600.0) for s in np.linspace(1, 400, 50)]
    assert all(b > a for a, b in zip(angles, angles[1:]))
    by_distance = [px_to_arcmin(50.0, screen, d) for d in np.linspace(200, 2000, 50)]
    assert all(b < a for a, b in zip(by_distance, by_distance[1:]))


def test_small_angle_agreement(screen):
    # below 2 degrees the exact formula agrees with the linear one to 0.1%
    for angle in np.linspace(0.5, 119.9, 40):
        px = arcmin_to_px(float(angle), screen, 600.0)
        small = (angle / SMALL_ANGLE_ARCMIN_PER_RAD) * 600.0 / 0.25
        assert abs(px - small) / small < 1e-3


def test_geometry_errors(screen):
    with pytest.raises(InvalidGeometry):
        px_to_arcmin(10.0, screen, 0.0)
    with pytest.raises(InvalidGeometry):
        px_to_arcmin(-1.0, screen, 600.0)
    with pytest.raises(InvalidGeometry):
        arcmin_to_px(90.0 * 60.0, screen, 600.0)
    with pytest.raises(InvalidGeometry):
        arcmin_to_px(-1.0, screen, 600.0)


def test_screen_profile_invariants():
    with pytest.raises(InvalidGeometry):
        ScreenProfile(480.0, 270.0, 1920, 1080, 0.2, 0.2)  # black == max
    with pytest.raises(InvalidGeometry):
        ScreenProfile(-480.0, 270.0, 1920, 1080, 250.0, 0.2)
    with pytest.raises(InvalidGeometry):
        # 4% pitch anisotropy exceeds the 1% tolerance
        ScreenProfile(480.0, 280.0, 1920, 1080, 250.0, 0.2)


def test_viewing_sample_invariants():
    with pytest.raises(InvalidGeometry):
        ViewingSample(distance_mm=0.0, ambient_lux=10.0, timestamp_ms=0)
    with pytest.raises(InvalidGeometry):
        ViewingSample(distance_mm=500.0, ambient_lux=-1.0, timestamp_ms=0)
