"""Pixel/visual-angle conversions anchored on physical display geometry.

All angles are carried in arcminutes (1/60 degree), the natural unit of
acuity. Pixel pitch is taken from the width axis; the ScreenProfile
invariant guarantees the pitch is square to within 1%, so a single pitch
is safe for both axes.
"""

import math
from dataclasses import dataclass

from .errors import InvalidGeometry

ARCMIN_PER_RADIAN = 60.0 * 180.0 / math.pi  # 3437.7467...


@dataclass(frozen=True)
class ScreenProfile:
    """Physical display geometry and luminance range."""

    width_mm: float
    height_mm: float
    width_px: int
    height_px: int
    max_luminance_cdm2: float
    black_luminance_cdm2: float

    def __post_init__(self):
        if min(self.width_mm, self.height_mm, self.width_px, self.height_px) <= 0:
            raise InvalidGeometry("screen dimensions must be positive")
        pitch_w = self.width_mm / self.width_px
        pitch_h = self.height_mm / self.height_px
        if abs(pitch_w - pitch_h) > 0.01 * pitch_w:
            raise InvalidGeometry(
                f"pixel pitch not square: {pitch_w:.5f} vs {pitch_h:.5f} mm/px"
            )
        if not 0 <= self.black_luminance_cdm2 < self.max_luminance_cdm2:
            raise InvalidGeometry("luminance range must satisfy 0 <= black < max")

    @property
    def pitch_mm(self) -> float:
        return self.width_mm / self.width_px

    def to_json(self) -> dict:
        return {
            "width_mm": self.width_mm,
            "height_mm": self.height_mm,
            "width_px": self.width_px,
            "height_px": self.height_px,
            "max_luminance_cdm2": self.max_luminance_cdm2,
            "black_luminance_cdm2": self.black_luminance_cdm2,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ScreenProfile":
        return cls(
            width_mm=float(obj["width_mm"]),
            height_mm=float(obj["height_mm"]),
            width_px=int(obj["width_px"]),
            height_px=int(obj["height_px"]),
            max_luminance_cdm2=float(obj["max_luminance_cdm2"]),
            black_luminance_cdm2=float(obj["black_luminance_cdm2"]),
        )


@dataclass(frozen=True)
class ViewingSample:
    """One reading from the distance sensor and ambient light sensor."""

    distance_mm: float
    ambient_lux: float
    timestamp_ms: int

    def __post_init__(self):
        if self.distance_mm <= 0:
            raise InvalidGeometry("viewing distance must be positive")
        if self.ambient_lux < 0:
            raise InvalidGeometry("ambient illuminance cannot be negative")

    def to_json(self) -> dict:
        return {
            "distance_mm": self.distance_mm,
            "ambient_lux": self.ambient_lux,
            "timestamp_ms": self.timestamp_ms,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ViewingSample":
        return cls(
            distance_mm=float(obj["distance_mm"]),
            ambient_lux=float(obj["ambient_lux"]),
            timestamp_ms=int(obj["timestamp_ms"]),
        )


def px_to_arcmin(size_px: float, screen: ScreenProfile, distance_mm: float) -> float:
    """Visual angle subtended by ``size_px`` pixels at ``distance_mm``."""
    if distance_mm <= 0:
        raise InvalidGeometry("distance must be positive")
    if size_px < 0:
        raise InvalidGeometry("size must be nonnegative")
    size_mm = size_px * screen.pitch_mm
    return 2.0 * math.atan(size_mm / (2.0 * distance_mm)) * ARCMIN_PER_RADIAN


def arcmin_to_px(angle_arcmin: float, screen: ScreenProfile, distance_mm: float) -> float:
    """Exact inverse of px_to_arcmin; the result may be fractional.

    Quantization to whole pixels is the stimulus module's concern.
    """
    if distance_mm <= 0:
        raise InvalidGeometry("distance must be positive")
    if angle_arcmin < 0:
        raise InvalidGeometry("angle must be nonnegative")
    if angle_arcmin >= 90.0 * 60.0:
        raise InvalidGeometry("angle must be below 90 degrees")
    half_rad = angle_arcmin / ARCMIN_PER_RADIAN / 2.0
    size_mm = 2.0 * distance_mm * math.tan(half_rad)
    return size_mm / screen.pitch_mm
