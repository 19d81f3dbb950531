"""Impairment screens derived from psychometric fits.

Each screen turns fitted thresholds (plus, for refraction, the viewing
distance statistics) into a ScreenResult: a suspect kind, a nonnegative
effect size normalized so 1.0 is the flag point, and the contributing
evidence. Ratio tests additionally require disjoint bootstrap intervals so
noise alone cannot flag a healthy child.
"""

import math
from dataclasses import dataclass, field

from .config import ScreenRuleConfig
from .errors import InsufficientData
from .psychometrics import PsychometricFit, clamped_ci, clamped_threshold

KIND_NO_FLAG = "no_flag"
KIND_MYOPIA = "myopia_suspect"
KIND_HYPEROPIA = "hyperopia_suspect"
KIND_ASTIGMATISM = "astigmatism_suspect"
KIND_CVD = "cvd_suspect"
KIND_NYCTALOPIA = "nyctalopia_suspect"

_DISTANCE_ORDER = {"near": 0, "mid": 1, "far": 2}


@dataclass(frozen=True)
class DistanceStats:
    mean_mm: float
    sd_mm: float
    n: int


@dataclass(frozen=True)
class ScreenResult:
    kind: str
    effect_size: float
    evidence: dict = field(default_factory=dict)
    axis_deg: float | None = None
    cvd_type: str | None = None

    @property
    def flagged(self) -> bool:
        return self.kind != KIND_NO_FLAG

    def to_json(self) -> dict:
        obj = {
            "kind": self.kind,
            "effect_size": self.effect_size,
            "evidence": self.evidence,
        }
        if self.axis_deg is not None:
            obj["axis_deg"] = self.axis_deg
        if self.cvd_type is not None:
            obj["cvd_type"] = self.cvd_type
        return obj


def _disjoint(ci_low_side: tuple, ci_high_side: tuple) -> bool:
    """True when the higher interval sits fully above the lower one."""
    return ci_high_side[0] > ci_low_side[1]


def _separation_z(ci_a: tuple, ci_b: tuple, ratio: float) -> float:
    """Log-ratio of two estimates in units of their pooled standard error."""
    sd_a = (math.log10(ci_a[1]) - math.log10(ci_a[0])) / 2.0 / 1.96
    sd_b = (math.log10(ci_b[1]) - math.log10(ci_b[0])) / 2.0 / 1.96
    pooled = math.sqrt(sd_a * sd_a + sd_b * sd_b)
    if pooled <= 0:
        return float("inf") if ratio > 1 else 0.0
    return math.log10(ratio) / pooled


# a ratio that clears the flag level without clearing the uncertainty gate
# is, by definition, insufficient evidence: report it just under the flag
# point so NoFlag <=> effect below threshold holds exactly
_NEARLY_FLAG = 0.99


def _ungated(effect: float) -> float:
    return min(max(effect, 0.0), _NEARLY_FLAG)


def _fit_evidence(fit: PsychometricFit) -> dict:
    return {
        "threshold": clamped_threshold(fit),
        "ci": list(clamped_ci(fit)),
        "n_trials": fit.n_trials,
        "floor_flag": fit.floor_flag,
        "ceiling_flag": fit.ceiling_flag,
    }


def refraction_screen(
    fits_by_distance_bin: dict,
    distance_stats: DistanceStats,
    cfg: ScreenRuleConfig | None = None,
) -> ScreenResult:
    """Two-criteria far/short-sightedness screen.

    Criterion 1 (resolution vs distance): ratio of the farthest to nearest
    populated bin's acuity threshold, flagged at >= ratio_flag with disjoint
    intervals. Criterion 2 (seating behavior): mean viewing distance
    conspicuously below or above the population comfort reference. Either
    criterion suffices; a child that sits where it sees well produces no
    usable far-bin data, so the behavioral route must stand on its own.
    """
    cfg = cfg or ScreenRuleConfig()
    if not fits_by_distance_bin:
        raise InsufficientData("no acuity fits in any distance bin")
    bins = sorted(fits_by_distance_bin, key=_DISTANCE_ORDER.__getitem__)

    evidence = {
        "bins": {b: _fit_evidence(fits_by_distance_bin[b]) for b in bins},
        "mean_distance_mm": distance_stats.mean_mm,
        "sd_distance_mm": distance_stats.sd_mm,
    }

    myopia_effect = 0.0
    hyperopia_effect = 0.0

    if len(bins) >= cfg.min_bins_for_ratio:
        near_fit = fits_by_distance_bin[bins[0]]
        far_fit = fits_by_distance_bin[bins[-1]]
        near_t, far_t = clamped_threshold(near_fit), clamped_threshold(far_fit)
        r_far = far_t / near_t
        evidence["ratio_far_over_near"] = r_far
        # gate: the elevated bin's interval must exclude the other bin's
        # point estimate, so noise in one fit cannot flag on its own
        if r_far >= cfg.ratio_flag and clamped_ci(far_fit)[0] > near_t:
            myopia_effect = (r_far - 1.0) / (cfg.ratio_flag - 1.0)
        if 1.0 / r_far >= cfg.ratio_flag and clamped_ci(near_fit)[0] > far_t:
            hyperopia_effect = (1.0 / r_far - 1.0) / (cfg.ratio_flag - 1.0)

    comfort = cfg.comfort_distance_mm
    if distance_stats.n > 0 and distance_stats.mean_mm > 0:
        near_gain = comfort / distance_stats.mean_mm - 1.0
        far_gain = distance_stats.mean_mm / comfort - 1.0
        myopia_distance_effect = near_gain / (comfort / cfg.myopia_distance_mm - 1.0)
        hyperopia_distance_effect = far_gain / (cfg.hyperopia_distance_mm / comfort - 1.0)
        myopia_effect = max(myopia_effect, myopia_distance_effect)
        hyperopia_effect = max(hyperopia_effect, hyperopia_distance_effect)

    evidence["myopia_effect"] = myopia_effect
    evidence["hyperopia_effect"] = hyperopia_effect
    if myopia_effect >= 1.0 and myopia_effect >= hyperopia_effect:
        return ScreenResult(KIND_MYOPIA, myopia_effect, evidence)
    if hyperopia_effect >= 1.0:
        return ScreenResult(KIND_HYPEROPIA, hyperopia_effect, evidence)
    return ScreenResult(KIND_NO_FLAG, max(myopia_effect, hyperopia_effect, 0.0), evidence)


def astigmatism_index(
    fits_by_orientation: dict, cfg: ScreenRuleConfig | None = None
) -> ScreenResult:
    """Orientation anisotropy of contrast thresholds.

    The reported axis is the best-seen grating axis, which under
    orientation-selective blur is the impairment's own axis (gratings along
    the cylinder axis survive; the perpendicular ones wash out).
    """
    cfg = cfg or ScreenRuleConfig()
    if len(fits_by_orientation) < cfg.min_axes_for_astigmatism:
        raise InsufficientData(
            f"{len(fits_by_orientation)} axes < minimum {cfg.min_axes_for_astigmatism}"
        )
    axes = sorted(fits_by_orientation)
    thresholds = {a: clamped_threshold(fits_by_orientation[a]) for a in axes}
    best_axis = min(axes, key=thresholds.__getitem__)
    worst_axis = max(axes, key=thresholds.__getitem__)
    anisotropy = thresholds[worst_axis] / thresholds[best_axis]
    effect = (anisotropy - 1.0) / (cfg.astigmatism_anisotropy_flag - 1.0)
    evidence = {
        "axes": {f"{a:g}": _fit_evidence(fits_by_orientation[a]) for a in axes},
        "anisotropy": anisotropy,
        "best_axis_deg": best_axis,
        "worst_axis_deg": worst_axis,
    }
    disjoint = _disjoint(
        clamped_ci(fits_by_orientation[best_axis]),
        clamped_ci(fits_by_orientation[worst_axis]),
    )
    if anisotropy >= cfg.astigmatism_anisotropy_flag and disjoint:
        return ScreenResult(KIND_ASTIGMATISM, effect, evidence, axis_deg=best_axis)
    return ScreenResult(KIND_NO_FLAG, _ungated(effect), evidence)


def cvd_classify(fits_by_axis: dict, cfg: ScreenRuleConfig | None = None) -> ScreenResult:
    """Flag the confusion axis whose threshold stands out from the others."""
    cfg = cfg or ScreenRuleConfig()
    missing = {"protan", "deutan", "tritan"} - set(fits_by_axis)
    if missing:
        raise InsufficientData(f"missing color axes: {sorted(missing)}")
    thresholds = {a: clamped_threshold(f) for a, f in fits_by_axis.items()}
    evidence = {"axes": {a: _fit_evidence(fits_by_axis[a]) for a in sorted(fits_by_axis)}}

    factors = {}
    for axis in sorted(fits_by_axis):
        others = sorted(thresholds[a] for a in fits_by_axis if a != axis)
        factors[axis] = thresholds[axis] / ((others[0] + others[1]) / 2.0)
    top_axis = max(factors, key=factors.__getitem__)
    effect = (factors[top_axis] - 1.0) / (cfg.cvd_factor_flag - 1.0)
    evidence["factors"] = {a: factors[a] for a in sorted(factors)}

    other_cis = [clamped_ci(fits_by_axis[a]) for a in fits_by_axis if a != top_axis]
    disjoint = all(_disjoint(ci, clamped_ci(fits_by_axis[top_axis])) for ci in other_cis)
    if factors[top_axis] >= cfg.cvd_factor_flag and disjoint:
        return ScreenResult(KIND_CVD, effect, evidence, cvd_type=top_axis)
    return ScreenResult(KIND_NO_FLAG, _ungated(effect), evidence)


def scotopic_ratio(
    photopic_fit: PsychometricFit,
    scotopic_fit: PsychometricFit,
    cfg: ScreenRuleConfig | None = None,
) -> ScreenResult:
    """Night-vision screen: scotopic threshold relative to the photopic one.

    Both thresholds are normalized by population references (different
    physical units) before the ratio, so a child who is generally weak but
    proportionally so in the dark does not flag.
    """
    cfg = cfg or ScreenRuleConfig()
    if photopic_fit is None or scotopic_fit is None:
        raise InsufficientData("need both a photopic and a scotopic fit")
    scot_norm = clamped_threshold(scotopic_fit) / cfg.scotopic_reference_delta_l
    phot_norm = clamped_threshold(photopic_fit) / cfg.photopic_reference_acuity_arcmin
    ratio = scot_norm / phot_norm
    effect = (ratio - 1.0) / (cfg.scotopic_ratio_flag - 1.0)
    evidence = {
        "photopic": _fit_evidence(photopic_fit),
        "scotopic": _fit_evidence(scotopic_fit),
        "normalized_ratio": ratio,
    }
    # gate: the two normalized estimates must be separated by two combined
    # standard errors (pooled from both intervals), the two-fit analogue of
    # interval disjointness
    z = _separation_z(clamped_ci(scotopic_fit), clamped_ci(photopic_fit), ratio)
    evidence["separation_z"] = z
    if ratio >= cfg.scotopic_ratio_flag and z >= 2.0:
        return ScreenResult(KIND_NYCTALOPIA, effect, evidence)
    return ScreenResult(KIND_NO_FLAG, _ungated(effect), evidence)
