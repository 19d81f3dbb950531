"""Configuration document: every tunable the screens and engine expose.

A single JSON document (versioned with "v": 1) carries the screen profile,
staircase parameters, bin edges, flag thresholds, alert parameters and the
service settings. Defaults here are the values the acceptance experiments
were tuned with.
"""

import json
from dataclasses import dataclass, field

from .errors import BadRequest
from .geometry import ScreenProfile

SCHEMA_VERSION = 1

# 24-inch class reference display: 0.25 mm square pixel pitch
DEFAULT_SCREEN = ScreenProfile(
    width_mm=480.0,
    height_mm=270.0,
    width_px=1920,
    height_px=1080,
    max_luminance_cdm2=250.0,
    black_luminance_cdm2=0.2,
)

# condition bin edges
DISTANCE_NEAR_MM = 450.0   # near < 450 <= mid < 900 <= far
DISTANCE_FAR_MM = 900.0
AMBIENT_SCOTOPIC_LUX = 10.0   # scotopic <= 10 < mesopic < 100 <= photopic
AMBIENT_PHOTOPIC_LUX = 100.0


@dataclass(frozen=True)
class StaircaseConfig:
    start: float
    min_intensity: float
    max_intensity: float
    step_decades: float = 0.1
    step_halvings: int = 2
    # optional second interleaved track anchored where impaired thresholds
    # live, so one lapse-crippled descent cannot starve a fit of data
    second_start: float | None = None


@dataclass(frozen=True)
class SessionConfig:
    budget_mini_game: int = 6       # probes per rolling 60 s
    budget_integrated: int = 3
    alphabet_size: int = 4
    orientation_axes_deg: tuple = (0.0, 45.0, 90.0, 135.0)
    # contrast-type starts sit ~2x above the population threshold so the
    # descent phase does not eat the per-channel trial budget
    staircases: dict = field(
        default_factory=lambda: {
            "acuity": StaircaseConfig(
                start=10.0, min_intensity=0.25, max_intensity=50.0, second_start=2.0
            ),
            "color": StaircaseConfig(
                start=0.04, min_intensity=0.003, max_intensity=0.5, second_start=0.2
            ),
            "orientation": StaircaseConfig(
                start=0.04, min_intensity=0.005, max_intensity=1.0, second_start=0.3
            ),
            "scotopic": StaircaseConfig(
                start=0.04, min_intensity=0.002, max_intensity=5.0, second_start=0.12
            ),
        }
    )


@dataclass(frozen=True)
class FitConfig:
    min_trials: int = 40
    min_levels: int = 3
    guess_from_alternatives: bool = True
    lapse_max: float = 0.06
    bootstrap_resamples: int = 200
    alpha_grid_points: int = 41
    alpha_grid_pad_decades: float = 0.5
    beta_grid: tuple = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
    lapse_grid: tuple = (0.0, 0.02, 0.04, 0.06)


@dataclass(frozen=True)
class ScreenRuleConfig:
    ratio_flag: float = 2.0                 # refraction far/near threshold ratio
    astigmatism_anisotropy_flag: float = 2.5
    cvd_factor_flag: float = 2.0
    scotopic_ratio_flag: float = 2.0
    comfort_distance_mm: float = 700.0      # population comfort reference
    myopia_distance_mm: float = 560.0       # mean closer than this is suspect
    hyperopia_distance_mm: float = 900.0    # mean farther than this is suspect
    min_bins_for_ratio: int = 2
    min_axes_for_astigmatism: int = 4
    # population references derived by simulating the unimpaired profile
    scotopic_reference_delta_l: float = 0.02
    photopic_reference_acuity_arcmin: float = 1.22


@dataclass(frozen=True)
class AlertConfig:
    window: int = 4
    baseline_cap: int = 10  # baseline window grows with history up to this
    ratio: float = 1.6
    min_points: int = 8
    ci_z: float = 1.96     # pooled-interval half width multiplier
    min_effect: float = 0.5


@dataclass(frozen=True)
class AppConfig:
    screen: ScreenProfile = DEFAULT_SCREEN
    session: SessionConfig = SessionConfig()
    fit: FitConfig = FitConfig()
    screen_rules: ScreenRuleConfig = ScreenRuleConfig()
    alerts: AlertConfig = AlertConfig()
    data_dir: str = "data"
    port: int = 8321
    children: dict = field(default_factory=dict)  # child_id -> display name

    def to_json(self) -> dict:
        return {
            "v": SCHEMA_VERSION,
            "screen": self.screen.to_json(),
            "session": {
                "budget_mini_game": self.session.budget_mini_game,
                "budget_integrated": self.session.budget_integrated,
                "alphabet_size": self.session.alphabet_size,
                "orientation_axes_deg": list(self.session.orientation_axes_deg),
                "staircases": {
                    k: {
                        "start": s.start,
                        "min_intensity": s.min_intensity,
                        "max_intensity": s.max_intensity,
                        "step_decades": s.step_decades,
                        "step_halvings": s.step_halvings,
                        "second_start": s.second_start,
                    }
                    for k, s in self.session.staircases.items()
                },
            },
            "fit": {
                "min_trials": self.fit.min_trials,
                "min_levels": self.fit.min_levels,
                "lapse_max": self.fit.lapse_max,
                "bootstrap_resamples": self.fit.bootstrap_resamples,
                "alpha_grid_points": self.fit.alpha_grid_points,
                "alpha_grid_pad_decades": self.fit.alpha_grid_pad_decades,
                "beta_grid": list(self.fit.beta_grid),
                "lapse_grid": list(self.fit.lapse_grid),
            },
            "screen_rules": {
                "ratio_flag": self.screen_rules.ratio_flag,
                "astigmatism_anisotropy_flag": self.screen_rules.astigmatism_anisotropy_flag,
                "cvd_factor_flag": self.screen_rules.cvd_factor_flag,
                "scotopic_ratio_flag": self.screen_rules.scotopic_ratio_flag,
                "comfort_distance_mm": self.screen_rules.comfort_distance_mm,
                "myopia_distance_mm": self.screen_rules.myopia_distance_mm,
                "hyperopia_distance_mm": self.screen_rules.hyperopia_distance_mm,
                "min_bins_for_ratio": self.screen_rules.min_bins_for_ratio,
                "min_axes_for_astigmatism": self.screen_rules.min_axes_for_astigmatism,
                "scotopic_reference_delta_l": self.screen_rules.scotopic_reference_delta_l,
                "photopic_reference_acuity_arcmin": self.screen_rules.photopic_reference_acuity_arcmin,
            },
            "alerts": {
                "window": self.alerts.window,
                "ratio": self.alerts.ratio,
                "min_points": self.alerts.min_points,
                "ci_z": self.alerts.ci_z,
                "min_effect": self.alerts.min_effect,
            },
            "data_dir": self.data_dir,
            "port": self.port,
            "children": dict(self.children),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AppConfig":
        if obj.get("v") != SCHEMA_VERSION:
            raise BadRequest(f"unsupported config version: {obj.get('v')!r}")
        sess = obj.get("session", {})
        fit = obj.get("fit", {})
        rules = obj.get("screen_rules", {})
        alerts = obj.get("alerts", {})
        defaults = cls()
        return cls(
            screen=ScreenProfile.from_json(obj["screen"]) if "screen" in obj else DEFAULT_SCREEN,
            session=SessionConfig(
                budget_mini_game=sess.get("budget_mini_game", defaults.session.budget_mini_game),
                budget_integrated=sess.get("budget_integrated", defaults.session.budget_integrated),
                alphabet_size=sess.get("alphabet_size", defaults.session.alphabet_size),
                orientation_axes_deg=tuple(
                    sess.get("orientation_axes_deg", defaults.session.orientation_axes_deg)
                ),
                staircases={
                    k: StaircaseConfig(
                        start=s["start"],
                        min_intensity=s["min_intensity"],
                        max_intensity=s["max_intensity"],
                        step_decades=s.get("step_decades", 0.1),
                        step_halvings=s.get("step_halvings", 2),
                        second_start=s.get("second_start"),
                    )
                    for k, s in sess.get(
                        "staircases",
                        {
                            k: {
                                "start": v.start,
                                "min_intensity": v.min_intensity,
                                "max_intensity": v.max_intensity,
                                "second_start": v.second_start,
                            }
                            for k, v in defaults.session.staircases.items()
                        },
                    ).items()
                },
            ),
            fit=FitConfig(
                min_trials=fit.get("min_trials", defaults.fit.min_trials),
                min_levels=fit.get("min_levels", defaults.fit.min_levels),
                lapse_max=fit.get("lapse_max", defaults.fit.lapse_max),
                bootstrap_resamples=fit.get("bootstrap_resamples", defaults.fit.bootstrap_resamples),
                alpha_grid_points=fit.get("alpha_grid_points", defaults.fit.alpha_grid_points),
                alpha_grid_pad_decades=fit.get(
                    "alpha_grid_pad_decades", defaults.fit.alpha_grid_pad_decades
                ),
                beta_grid=tuple(fit.get("beta_grid", defaults.fit.beta_grid)),
                lapse_grid=tuple(fit.get("lapse_grid", defaults.fit.lapse_grid)),
            ),
            screen_rules=ScreenRuleConfig(
                **{
                    key: rules.get(key, getattr(defaults.screen_rules, key))
                    for key in (
                        "ratio_flag",
                        "astigmatism_anisotropy_flag",
                        "cvd_factor_flag",
                        "scotopic_ratio_flag",
                        "comfort_distance_mm",
                        "myopia_distance_mm",
                        "hyperopia_distance_mm",
                        "min_bins_for_ratio",
                        "min_axes_for_astigmatism",
                        "scotopic_reference_delta_l",
                        "photopic_reference_acuity_arcmin",
                    )
                }
            ),
            alerts=AlertConfig(
                window=alerts.get("window", defaults.alerts.window),
                ratio=alerts.get("ratio", defaults.alerts.ratio),
                min_points=alerts.get("min_points", defaults.alerts.min_points),
                ci_z=alerts.get("ci_z", defaults.alerts.ci_z),
                min_effect=alerts.get("min_effect", defaults.alerts.min_effect),
            ),
            data_dir=obj.get("data_dir", defaults.data_dir),
            port=obj.get("port", defaults.port),
            children=dict(obj.get("children", {})),
        )


def load_config(path: str) -> AppConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return AppConfig.from_json(json.load(fh))


def save_config(cfg: AppConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_json(), fh, indent=2)
        fh.write("\n")
