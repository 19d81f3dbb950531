"""Covert probe scheduling inside gameplay.

One SessionState owns a 3-down-1-up staircase per channel, a rolling probe
budget so testing stays unobtrusive, and the append-only trial log. Probes
rotate toward the channel with the fewest trials in the current
distance x ambient cell so the condition grid the screens need gets
covered.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import (
    AMBIENT_PHOTOPIC_LUX,
    AMBIENT_SCOTOPIC_LUX,
    DISTANCE_FAR_MM,
    DISTANCE_NEAR_MM,
    SessionConfig,
    StaircaseConfig,
)
from .color import max_in_gamut_contrast
from .errors import DuplicateTrial, UnknownChannel
from .geometry import ScreenProfile, ViewingSample
from .jsonutil import canonical_dumps
from .stimulus import (
    CHANNEL_COLOR,
    CHANNEL_SCOTOPIC,
    COLOR_AXES,
    MODE_INTEGRATED,
    MODE_MINI_GAME,
    Channel,
    StimulusSpec,
    make_stimulus,
    min_feasible_intensity,
)

RESPONSE_CORRECT = "correct"
RESPONSE_INCORRECT = "incorrect"
RESPONSE_NO_RESPONSE = "no_response"
RESPONSES = (RESPONSE_CORRECT, RESPONSE_INCORRECT, RESPONSE_NO_RESPONSE)

BIN_NEAR, BIN_MID, BIN_FAR = "near", "mid", "far"
BIN_SCOTOPIC, BIN_MESOPIC, BIN_PHOTOPIC = "scotopic", "mesopic", "photopic"


class Defer:
    """Sentinel: no probe right now (budget, gating or quantization)."""

    def __repr__(self):
        return "Defer"


DEFER = Defer()


def bin_view(view: ViewingSample) -> tuple:
    """(distance_bin, ambient_bin) for a viewing sample.

    Boundaries belong to the upper distance bin and, for ambient, 10 lux is
    still scotopic while 100 lux is already photopic.
    """
    if view.distance_mm < DISTANCE_NEAR_MM:
        dbin = BIN_NEAR
    elif view.distance_mm < DISTANCE_FAR_MM:
        dbin = BIN_MID
    else:
        dbin = BIN_FAR
    if view.ambient_lux <= AMBIENT_SCOTOPIC_LUX:
        abin = BIN_SCOTOPIC
    elif view.ambient_lux < AMBIENT_PHOTOPIC_LUX:
        abin = BIN_MESOPIC
    else:
        abin = BIN_PHOTOPIC
    return dbin, abin


@dataclass
class Staircase:
    """Transformed 3-down-1-up staircase on log10 intensity.

    Converges to the stimulus level where P(correct)^3 = 0.5, i.e.
    P(correct) = 0.794. The step starts at 0.1 decades and halves after
    each of the first `halvings` reversals.
    """

    intensity: float
    min_intensity: float
    max_intensity: float
    step_decades: float = 0.1
    halvings: int = 2
    consecutive_correct: int = 0
    reversals: int = 0
    last_direction: int = 0
    reversal_intensities: list = field(default_factory=list)

    @classmethod
    def from_config(cls, cfg: StaircaseConfig, max_override: float | None = None) -> "Staircase":
        max_intensity = cfg.max_intensity if max_override is None else min(
            cfg.max_intensity, max_override
        )
        return cls(
            intensity=min(cfg.start, max_intensity),
            min_intensity=cfg.min_intensity,
            max_intensity=max_intensity,
            step_decades=cfg.step_decades,
            halvings=cfg.step_halvings,
        )

    def _move(self, direction: int) -> None:
        at_reversal = self.last_direction != 0 and direction != self.last_direction
        if at_reversal:
            self.reversals += 1
            self.reversal_intensities.append(self.intensity)
        new = self.intensity * 10.0 ** (direction * self.step_decades)
        self.intensity = min(max(new, self.min_intensity), self.max_intensity)
        self.last_direction = direction
        if at_reversal and self.reversals <= self.halvings:
            self.step_decades /= 2.0

    def update(self, correct: bool) -> None:
        if correct:
            self.consecutive_correct += 1
            if self.consecutive_correct >= 3:
                self.consecutive_correct = 0
                self._move(-1)
        else:
            self.consecutive_correct = 0
            self._move(+1)

    def to_json(self) -> dict:
        return {
            "intensity": self.intensity,
            "min_intensity": self.min_intensity,
            "max_intensity": self.max_intensity,
            "step_decades": self.step_decades,
            "consecutive_correct": self.consecutive_correct,
            "reversals": self.reversals,
            "last_direction": self.last_direction,
        }


@dataclass(frozen=True)
class TrialRecord:
    """One probe outcome with its viewing-condition covariates."""

    trial_id: str
    session_id: str
    spec: StimulusSpec
    view: ViewingSample
    response: str
    response_time_ms: int
    credit_awarded: bool = False

    def __post_init__(self):
        if self.response not in RESPONSES:
            raise ValueError(f"response must be one of {RESPONSES}")
        if self.response_time_ms < 0:
            raise ValueError("response time cannot be negative")

    def to_json(self) -> dict:
        return {
            "v": 1,
            "trial_id": self.trial_id,
            "session_id": self.session_id,
            "spec": self.spec.to_json(),
            "view": self.view.to_json(),
            "response": self.response,
            "response_time_ms": self.response_time_ms,
            "credit_awarded": self.credit_awarded,
        }

    def to_json_line(self) -> str:
        return canonical_dumps(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> "TrialRecord":
        return cls(
            trial_id=obj["trial_id"],
            session_id=obj["session_id"],
            spec=StimulusSpec.from_json(obj["spec"]),
            view=ViewingSample.from_json(obj["view"]),
            response=obj["response"],
            response_time_ms=int(obj["response_time_ms"]),
            credit_awarded=bool(obj["credit_awarded"]),
        )


def default_channels(cfg: SessionConfig) -> list:
    channels = [Channel.acuity()]
    channels += [Channel.color(axis) for axis in COLOR_AXES]
    channels += [Channel.orientation(a) for a in cfg.orientation_axes_deg]
    channels.append(Channel.scotopic())
    return channels


class SessionState:
    """Single-writer state for one child's play session."""

    def __init__(
        self,
        child_id: str,
        session_id: str,
        screen: ScreenProfile,
        config: SessionConfig | None = None,
        rng_seed: int = 0,
        color_contrast_caps: dict | None = None,
    ):
        self.child_id = child_id
        self.session_id = session_id
        self.screen = screen
        self.config = config or SessionConfig()
        self.rng = np.random.default_rng(rng_seed)
        self.channels = default_channels(self.config)
        # channels interleave two staircase tracks (configured start plus an
        # anchor in impaired-threshold territory) so one lapse-crippled
        # descent cannot starve a fit of near-threshold data; color tracks
        # are additionally capped at the largest contrast the display gamut
        # can actually render from the probe background
        self.staircases = {}
        for ch in self.channels:
            sc_cfg = self.config.staircases[ch.kind]
            cap = None
            if ch.kind == CHANNEL_COLOR:
                cap = max_in_gamut_contrast(ch.axis)
            if color_contrast_caps and ch.key() in color_contrast_caps:
                cap = color_contrast_caps[ch.key()]
            tracks = [Staircase.from_config(sc_cfg, max_override=cap)]
            if sc_cfg.second_start is not None:
                second = Staircase.from_config(sc_cfg, max_override=cap)
                second.intensity = min(sc_cfg.second_start, second.max_intensity)
                tracks.append(second)
            self.staircases[ch.key()] = tracks
        self.trial_log: list = []
        self._recorded_ids: set = set()
        self._emitted_ms: deque = deque()
        self._cell_counts: dict = {}
        self._channel_trials: dict = {}

    # -- scheduling -------------------------------------------------------

    def _budget(self, mode: str) -> int:
        return (
            self.config.budget_mini_game
            if mode == MODE_MINI_GAME
            else self.config.budget_integrated
        )

    def probes_last_minute(self, now_ms: int) -> int:
        while self._emitted_ms and self._emitted_ms[0] <= now_ms - 60_000:
            self._emitted_ms.popleft()
        return len(self._emitted_ms)

    def _eligible(self, ambient_bin: str) -> list:
        if ambient_bin == BIN_SCOTOPIC:
            return [c for c in self.channels if c.kind == CHANNEL_SCOTOPIC]
        return [c for c in self.channels if c.kind != CHANNEL_SCOTOPIC]

    # acuity feeds two screens (refraction per distance bin, the night-vision
    # reference) and its staircase has the longest descent, so it gets twice
    # the rotation share of the single-purpose channels
    _ROTATION_WEIGHT = {"acuity": 2.0}

    def next_trial(self, view: ViewingSample, mode: str = MODE_MINI_GAME):
        """Pick a channel and emit a feasible spec, or DEFER."""
        if self.probes_last_minute(view.timestamp_ms) >= self._budget(mode):
            return DEFER
        cell = bin_view(view)
        counts = self._cell_counts.get(cell, {})
        candidates = sorted(
            self._eligible(cell[1]),
            key=lambda ch: (
                counts.get(ch.key(), 0) / self._ROTATION_WEIGHT.get(ch.kind, 1.0),
                self.channels.index(ch),
            ),
        )
        seed = int(self.rng.integers(0, 2**31 - 1))
        for channel in candidates:
            stair = self._track(channel.key())
            # probe at the staircase level, lifted to the quantization floor
            # for this viewing distance when needed (the staircase itself is
            # not moved; re-planning beats silently starving the channel)
            floor = min_feasible_intensity(channel, self.screen, view.distance_mm)
            intensity = max(stair.intensity, floor)
            if intensity > stair.max_intensity:
                continue
            spec = make_stimulus(
                channel,
                intensity,
                self.screen,
                view,
                mode=mode,
                alphabet_size=self.config.alphabet_size,
                rng_seed=seed,
            )
            if not spec.feasible:
                continue
            self._emitted_ms.append(view.timestamp_ms)
            return spec
        return DEFER

    def _track(self, key: str) -> Staircase:
        """Active staircase track: rotates with the channel's recorded count.

        Emission and recording alternate per channel in normal operation, so
        parity keeps both sides pointed at the same track.
        """
        tracks = self.staircases[key]
        return tracks[self._channel_trials.get(key, 0) % len(tracks)]

    # -- recording --------------------------------------------------------

    def record_response(self, trial: TrialRecord) -> tuple:
        """Append the trial, update its staircase, award credit.

        Returns (self, credit_awarded). The log is append-only: existing
        records are never touched.
        """
        if trial.trial_id in self._recorded_ids:
            raise DuplicateTrial(trial.trial_id)
        key = trial.spec.channel.key()
        if key not in self.staircases:
            raise UnknownChannel(key)
        credit = trial.response == RESPONSE_CORRECT
        stored = TrialRecord(
            trial_id=trial.trial_id,
            session_id=trial.session_id,
            spec=trial.spec,
            view=trial.view,
            response=trial.response,
            response_time_ms=trial.response_time_ms,
            credit_awarded=credit,
        )
        self.trial_log.append(stored)
        self._recorded_ids.add(trial.trial_id)
        cell = bin_view(trial.view)
        cell_counts = self._cell_counts.setdefault(cell, {})
        cell_counts[key] = cell_counts.get(key, 0) + 1
        # no-response moves the staircase like an error but is excluded
        # from psychometric fits downstream (inattention, not inability)
        self._track(key).update(trial.response == RESPONSE_CORRECT)
        self._channel_trials[key] = self._channel_trials.get(key, 0) + 1
        return self, credit

    def serialized_log(self) -> list:
        return [t.to_json_line() for t in self.trial_log]
