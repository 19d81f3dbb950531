"""Simulated child with ground-truth impairments.

This is the desk-scale stand-in for real hardware and subjects: a
parametric optics model maps an ImpairmentProfile plus viewing conditions
to an effective threshold per channel, and responses are drawn from the
same logistic law the fitting module assumes. The optics here define the
simulation's ground truth, nothing more.

Blur model: defocus error E (diopters) produces a blur disc of angular
size 3.44 arcmin per mm of pupil per diopter (the small-angle identity
blur_rad = pupil_m * defocus_D), combined with baseline acuity in
quadrature so thresholds stay smooth near E = 0.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .config import SessionConfig
from .errors import InfeasibleStimulus
from .geometry import ScreenProfile, ViewingSample
from .session import (
    BIN_SCOTOPIC,
    DEFER,
    RESPONSE_CORRECT,
    RESPONSE_INCORRECT,
    SessionState,
    TrialRecord,
    bin_view,
)
from .stimulus import (
    CHANNEL_ACUITY,
    CHANNEL_COLOR,
    CHANNEL_ORIENTATION,
    CHANNEL_SCOTOPIC,
    MODE_MINI_GAME,
    StimulusSpec,
)

BLUR_ARCMIN_PER_MM_DIOPTER = 3.44
CVD_BASE_CONE_CONTRAST = 0.02
ORIENTATION_BASE_CONTRAST = 0.02
SCOTOPIC_BASE_DELTA_L = 0.02  # population increment threshold, cd/m^2

COMFORT_DISTANCE_M = 0.7
COMFORT_SIGMA_LOG10 = 0.15
# hyperopes prefer distances where accommodative demand stays within half
# their amplitude; when no distance achieves that, they settle this far out
SUSTAINABLE_ACCOMMODATION_FRACTION = 0.5
STRAIN_AVOIDANCE_DISTANCE_M = 1.05

RESPONSE_TIME_MS = 800


@dataclass(frozen=True)
class ImpairmentProfile:
    """Ground-truth deficits for one simulated child."""

    sphere_d: float = 0.0            # signed; negative = myopia
    cyl_d: float = 0.0               # >= 0
    cyl_axis_deg: float = 0.0        # [0, 180)
    accommodation_d: float = 8.0     # child's accommodation amplitude
    pupil_photopic_mm: float = 4.0
    pupil_scotopic_mm: float = 6.0
    baseline_acuity_arcmin: float = 1.0
    cvd_type: str | None = None      # protan / deutan / tritan
    cvd_severity: float = 0.0        # [0, 1]
    nyctalopia_factor: float = 1.0   # >= 1
    lapse_lambda: float = 0.02
    slope_beta: float = 8.0

    def __post_init__(self):
        if self.cyl_d < 0:
            raise ValueError("cylinder power cannot be negative")
        if not 0 <= self.cyl_axis_deg < 180:
            raise ValueError("cylinder axis must lie in [0, 180)")
        if not 0 <= self.cvd_severity <= 1:
            raise ValueError("cvd severity must lie in [0, 1]")
        if self.nyctalopia_factor < 1:
            raise ValueError("nyctalopia factor must be >= 1")

    def to_json(self) -> dict:
        return {
            "v": 1,
            "sphere_d": self.sphere_d,
            "cyl_d": self.cyl_d,
            "cyl_axis_deg": self.cyl_axis_deg,
            "accommodation_d": self.accommodation_d,
            "pupil_photopic_mm": self.pupil_photopic_mm,
            "pupil_scotopic_mm": self.pupil_scotopic_mm,
            "baseline_acuity_arcmin": self.baseline_acuity_arcmin,
            "cvd_type": self.cvd_type,
            "cvd_severity": self.cvd_severity,
            "nyctalopia_factor": self.nyctalopia_factor,
            "lapse_lambda": self.lapse_lambda,
            "slope_beta": self.slope_beta,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ImpairmentProfile":
        fields = {k: v for k, v in obj.items() if k != "v"}
        return cls(**fields)

    @classmethod
    def load(cls, path: str) -> "ImpairmentProfile":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def defocus_diopters(profile: ImpairmentProfile, distance_m: float) -> float:
    """Uncompensated defocus when fixating the screen at distance_m.

    A myope sees sharply inside its far point (no accommodation needed and
    none can help beyond it); a hyperope spends accommodation on both the
    distance and its refractive deficit, blurring once demand exceeds the
    amplitude.
    """
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    s = profile.sphere_d
    if s < 0:
        return max(0.0, abs(s) - 1.0 / distance_m)
    return max(0.0, 1.0 / distance_m + s - profile.accommodation_d)


def _pupil_mm(profile: ImpairmentProfile, view: ViewingSample) -> float:
    return (
        profile.pupil_scotopic_mm
        if bin_view(view)[1] == BIN_SCOTOPIC
        else profile.pupil_photopic_mm
    )


def _blurred_acuity(profile: ImpairmentProfile, view: ViewingSample, e_eff: float) -> float:
    blur = BLUR_ARCMIN_PER_MM_DIOPTER * _pupil_mm(profile, view) * e_eff
    return math.hypot(profile.baseline_acuity_arcmin, blur)


def effective_threshold(profile: ImpairmentProfile, channel, view: ViewingSample) -> float:
    """Ground-truth threshold in the channel's own intensity units."""
    e = defocus_diopters(profile, view.distance_mm / 1000.0)
    if channel.kind == CHANNEL_ACUITY:
        return _blurred_acuity(profile, view, e)
    if channel.kind == CHANNEL_ORIENTATION:
        psi_phi = math.radians(channel.axis_deg - profile.cyl_axis_deg)
        e_eff = e + profile.cyl_d * math.sin(psi_phi) ** 2
        theta = _blurred_acuity(profile, view, e_eff)
        contrast = ORIENTATION_BASE_CONTRAST * theta / profile.baseline_acuity_arcmin
        return min(1.0, contrast)
    if channel.kind == CHANNEL_COLOR:
        if channel.axis == profile.cvd_type:
            return CVD_BASE_CONE_CONTRAST * (1.0 + 9.0 * profile.cvd_severity)
        return CVD_BASE_CONE_CONTRAST
    if channel.kind == CHANNEL_SCOTOPIC:
        return SCOTOPIC_BASE_DELTA_L * profile.nyctalopia_factor
    raise ValueError(f"unknown channel kind: {channel.kind!r}")


def p_correct(profile: ImpairmentProfile, spec: StimulusSpec, view: ViewingSample) -> float:
    """Logistic response law at this stimulus intensity."""
    theta = effective_threshold(profile, spec.channel, view)
    gamma = 1.0 / spec.alternatives
    z = (math.log10(spec.intensity) - math.log10(theta)) * profile.slope_beta
    logistic = 1.0 / (1.0 + math.exp(-z))
    return gamma + (1.0 - gamma - profile.lapse_lambda) * logistic


def respond(profile: ImpairmentProfile, spec: StimulusSpec, view: ViewingSample, rng) -> str:
    if not spec.feasible:
        raise InfeasibleStimulus("observer cannot respond to an unrenderable probe")
    p = p_correct(profile, spec, view)
    return RESPONSE_CORRECT if rng.random() < p else RESPONSE_INCORRECT


def preferred_distance(profile: ImpairmentProfile, rng) -> float:
    """Distance (m) the child settles at for this trial.

    Log-normal comfort sampling around 0.7 m, clamped into the zone where
    the child sees without defocus. Myopes cap at their far point. Hyperopes
    additionally avoid sustained accommodation beyond half their amplitude;
    when no distance is comfortable by that criterion they settle far out.
    """
    d = 10.0 ** rng.normal(math.log10(COMFORT_DISTANCE_M), COMFORT_SIGMA_LOG10)
    s = profile.sphere_d
    if s < 0:
        far_point = 1.0 / abs(s)
        return min(d, far_point)
    if s > 0:
        reserve = profile.accommodation_d - s
        if reserve <= 0:
            return max(d, STRAIN_AVOIDANCE_DISTANCE_M)
        d = max(d, 1.0 / reserve)
        sustainable = profile.accommodation_d * SUSTAINABLE_ACCOMMODATION_FRACTION - s
        if sustainable > 0:
            d = max(d, 1.0 / sustainable)
        else:
            d = max(d, STRAIN_AVOIDANCE_DISTANCE_M)
    return d


def default_ambient_schedule() -> list:
    """Mixed home lighting: mostly lit play with dark-room stretches."""
    return [300.0] * 14 + [3.0] * 6


def run_session(
    profile: ImpairmentProfile,
    screen: ScreenProfile,
    n_trials: int,
    ambient_schedule=None,
    seed: int = 0,
    child_id: str = "sim",
    session_id: str = "s1",
    session_config: SessionConfig | None = None,
    start_ms: int = 1_700_000_000_000,
    trial_spacing_ms: int = 10_000,
) -> list:
    """Drive a full covert-screening session against the simulated child.

    Returns the list of TrialRecord (deterministic for fixed inputs and
    seed). Attempts where the engine defers produce no record.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial attempt")
    schedule = list(ambient_schedule or default_ambient_schedule())
    rng = np.random.default_rng(seed)
    state = SessionState(
        child_id=child_id,
        session_id=session_id,
        screen=screen,
        config=session_config,
        rng_seed=int(rng.integers(0, 2**31 - 1)),
    )
    records = []
    for i in range(n_trials):
        view = ViewingSample(
            distance_mm=preferred_distance(profile, rng) * 1000.0,
            ambient_lux=schedule[i % len(schedule)],
            timestamp_ms=start_ms + i * trial_spacing_ms,
        )
        spec = state.next_trial(view, mode=MODE_MINI_GAME)
        if spec is DEFER:
            continue
        response = respond(profile, spec, view, rng)
        trial = TrialRecord(
            trial_id=f"t{i:06d}",
            session_id=session_id,
            spec=spec,
            view=view,
            response=response,
            response_time_ms=RESPONSE_TIME_MS,
        )
        _, _credit = state.record_response(trial)
        records.append(state.trial_log[-1])
    return records


def write_log(records: list, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json_line() + "\n")


# canonical fixture profiles used by the verification experiments
FIXTURE_PROFILES = {
    "emmetrope": ImpairmentProfile(),
    "myope_2d": ImpairmentProfile(sphere_d=-2.0),
    "hyperope_6d": ImpairmentProfile(sphere_d=6.0, accommodation_d=8.0),
    "astigmat_1_5d_90": ImpairmentProfile(cyl_d=1.5, cyl_axis_deg=90.0),
    "deutan_full": ImpairmentProfile(cvd_type="deutan", cvd_severity=1.0),
    "nyctalope_3x": ImpairmentProfile(nyctalopia_factor=3.0),
}
