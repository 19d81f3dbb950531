"""Parametric probe specifications for the four impairment channels.

A StimulusSpec fully determines what the game UI must draw and what the
simulated observer responds to: channel, physical intensity, the target
symbol among m alternatives, placement, and the critical feature size in
(fractional) pixels. Specs whose critical feature would fall below one
device pixel are marked infeasible instead of silently rounding up, so the
session engine can re-plan.
"""

import random
from dataclasses import dataclass

from .errors import AmbientTooBright, InvalidIntensity
from .geometry import ScreenProfile, ViewingSample, arcmin_to_px

MODE_MINI_GAME = "mini_game"
MODE_INTEGRATED = "integrated"
MODES = (MODE_MINI_GAME, MODE_INTEGRATED)

CHANNEL_ACUITY = "acuity"
CHANNEL_COLOR = "color"
CHANNEL_ORIENTATION = "orientation"
CHANNEL_SCOTOPIC = "scotopic"

COLOR_AXES = ("protan", "deutan", "tritan")

# symbol alphabet the game skins map onto its own art
SYMBOLS = ("circle", "square", "triangle", "star", "diamond", "cross", "ring", "moon")

# fixed operating points (visual-angle units so they are distance invariant)
GAP_TO_SYMBOL_RATIO = 5.0          # optotype symbol is 5x its gap
SYMBOL_EXTENT_ARCMIN = 120.0       # color and scotopic blob diameter
GRATING_CYCLES_PER_DEG = 6.0       # orientation channel spatial frequency
SCOTOPIC_MAX_AMBIENT_LUX = 10.0
MIN_FEATURE_PX = 1.0
PLACEMENT_MARGIN_PX = 8


@dataclass(frozen=True)
class Channel:
    """Impairment channel a probe targets.

    kind is one of acuity/color/orientation/scotopic; color carries the
    confusion axis, orientation the grating axis in degrees within [0, 180).
    """

    kind: str
    axis: str | None = None
    axis_deg: float | None = None

    def __post_init__(self):
        if self.kind == CHANNEL_COLOR:
            if self.axis not in COLOR_AXES:
                raise ValueError(f"color channel needs axis in {COLOR_AXES}")
        elif self.kind == CHANNEL_ORIENTATION:
            if self.axis_deg is None or not 0 <= self.axis_deg < 180:
                raise ValueError("orientation axis must lie in [0, 180)")
        elif self.kind not in (CHANNEL_ACUITY, CHANNEL_SCOTOPIC):
            raise ValueError(f"unknown channel kind: {self.kind!r}")

    @classmethod
    def acuity(cls) -> "Channel":
        return cls(CHANNEL_ACUITY)

    @classmethod
    def color(cls, axis: str) -> "Channel":
        return cls(CHANNEL_COLOR, axis=axis)

    @classmethod
    def orientation(cls, axis_deg: float) -> "Channel":
        return cls(CHANNEL_ORIENTATION, axis_deg=float(axis_deg))

    @classmethod
    def scotopic(cls) -> "Channel":
        return cls(CHANNEL_SCOTOPIC)

    def key(self) -> str:
        """Stable identifier used for staircases, fits and reports."""
        if self.kind == CHANNEL_COLOR:
            return f"color:{self.axis}"
        if self.kind == CHANNEL_ORIENTATION:
            return f"orientation:{self.axis_deg:g}"
        return self.kind

    def to_json(self) -> dict:
        obj = {"kind": self.kind}
        if self.kind == CHANNEL_COLOR:
            obj["axis"] = self.axis
        elif self.kind == CHANNEL_ORIENTATION:
            obj["axis_deg"] = self.axis_deg
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "Channel":
        return cls(
            kind=obj["kind"],
            axis=obj.get("axis"),
            axis_deg=obj.get("axis_deg"),
        )


@dataclass(frozen=True)
class StimulusSpec:
    """One renderable probe; the contract between engine, UI and simulator."""

    channel: Channel
    intensity: float
    target_descriptor: str
    distractor_descriptors: tuple
    position_px: tuple
    rendered_size_px: float
    mode: str
    feasible: bool

    @property
    def alternatives(self) -> int:
        return 1 + len(self.distractor_descriptors)

    def to_json(self) -> dict:
        return {
            "channel": self.channel.to_json(),
            "intensity": self.intensity,
            "target_descriptor": self.target_descriptor,
            "distractor_descriptors": list(self.distractor_descriptors),
            "position_px": list(self.position_px),
            "rendered_size_px": self.rendered_size_px,
            "mode": self.mode,
            "feasible": self.feasible,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StimulusSpec":
        return cls(
            channel=Channel.from_json(obj["channel"]),
            intensity=float(obj["intensity"]),
            target_descriptor=obj["target_descriptor"],
            distractor_descriptors=tuple(obj["distractor_descriptors"]),
            position_px=tuple(obj["position_px"]),
            rendered_size_px=float(obj["rendered_size_px"]),
            mode=obj["mode"],
            feasible=bool(obj["feasible"]),
        )


def intensity_bounds(channel: Channel, screen: ScreenProfile) -> tuple:
    """Physical (open/closed) bounds for the channel's intensity."""
    if channel.kind == CHANNEL_ACUITY:
        return 0.0, 90.0 * 60.0  # any positive gap below 90 degrees
    if channel.kind in (CHANNEL_COLOR, CHANNEL_ORIENTATION):
        return 0.0, 1.0
    return 0.0, screen.max_luminance_cdm2 - screen.black_luminance_cdm2


def critical_feature_arcmin(channel: Channel, intensity: float) -> float:
    """Angular size of the feature that must survive pixel quantization."""
    if channel.kind == CHANNEL_ACUITY:
        return intensity  # the gap itself
    if channel.kind == CHANNEL_ORIENTATION:
        return 60.0 / GRATING_CYCLES_PER_DEG / 2.0  # one grating half cycle
    return SYMBOL_EXTENT_ARCMIN


def symbol_extent_arcmin(channel: Channel, intensity: float) -> float:
    if channel.kind == CHANNEL_ACUITY:
        return intensity * GAP_TO_SYMBOL_RATIO
    return SYMBOL_EXTENT_ARCMIN


def make_stimulus(
    channel: Channel,
    intensity: float,
    screen: ScreenProfile,
    view: ViewingSample,
    mode: str = MODE_MINI_GAME,
    alphabet_size: int = 4,
    rng_seed: int = 0,
) -> StimulusSpec:
    """Build the probe spec for one trial.

    Deterministic for fixed arguments: target identity and placement come
    from a private RNG seeded with rng_seed.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not 2 <= alphabet_size <= len(SYMBOLS):
        raise ValueError(f"alphabet size must be in [2, {len(SYMBOLS)}]")
    lo, hi = intensity_bounds(channel, screen)
    if not lo < intensity <= hi:
        raise InvalidIntensity(
            f"{channel.key()} intensity {intensity} outside ({lo}, {hi}]"
        )
    if channel.kind == CHANNEL_SCOTOPIC and view.ambient_lux > SCOTOPIC_MAX_AMBIENT_LUX:
        raise AmbientTooBright(
            f"scotopic probe at {view.ambient_lux} lux (limit {SCOTOPIC_MAX_AMBIENT_LUX})"
        )

    rendered_size_px = arcmin_to_px(
        critical_feature_arcmin(channel, intensity), screen, view.distance_mm
    )
    extent_px = arcmin_to_px(
        symbol_extent_arcmin(channel, intensity), screen, view.distance_mm
    )
    half = extent_px / 2.0
    x_lo = PLACEMENT_MARGIN_PX + half
    x_hi = screen.width_px - PLACEMENT_MARGIN_PX - half
    y_lo = PLACEMENT_MARGIN_PX + half
    y_hi = screen.height_px - PLACEMENT_MARGIN_PX - half

    feasible = rendered_size_px >= MIN_FEATURE_PX and x_lo <= x_hi and y_lo <= y_hi

    rng = random.Random(rng_seed)
    alphabet = list(SYMBOLS[:alphabet_size])
    target = alphabet[rng.randrange(alphabet_size)]
    distractors = tuple(s for s in alphabet if s != target)
    if x_lo <= x_hi and y_lo <= y_hi:
        position = (rng.randint(int(x_lo), int(x_hi)), rng.randint(int(y_lo), int(y_hi)))
    else:
        position = (screen.width_px // 2, screen.height_px // 2)

    return StimulusSpec(
        channel=channel,
        intensity=intensity,
        target_descriptor=target,
        distractor_descriptors=distractors,
        position_px=position,
        rendered_size_px=rendered_size_px,
        mode=mode,
        feasible=feasible,
    )


def min_feasible_intensity(
    channel: Channel, screen: ScreenProfile, distance_mm: float
) -> float:
    """Smallest intensity whose critical feature renders at >= 1 px.

    Only the acuity channel's feature scales with intensity; the other
    channels have fixed angular extents, so their floor does not depend on
    intensity and 0 is returned (any in-bounds intensity renders).
    """
    if channel.kind != CHANNEL_ACUITY:
        return 0.0
    from .geometry import px_to_arcmin

    return px_to_arcmin(MIN_FEATURE_PX, screen, distance_mm)
