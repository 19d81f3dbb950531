import pytest

from gamesight.geometry import ScreenProfile, ViewingSample


@pytest.fixture
def screen() -> ScreenProfile:
    # 0.25 mm square pitch, the geometry used throughout the worked examples
    return ScreenProfile(
        width_mm=480.0,
        height_mm=270.0,
        width_px=1920,
        height_px=1080,
        max_luminance_cdm2=250.0,
        black_luminance_cdm2=0.2,
    )


def make_view(distance_mm=600.0, ambient_lux=300.0, timestamp_ms=0) -> ViewingSample:
    return ViewingSample(
        distance_mm=distance_mm, ambient_lux=ambient_lux, timestamp_ms=timestamp_ms
    )


@pytest.fixture
def view():
    return make_view()
