"""Longitudinal threshold series, change detection and parent reports.

Deterioration is detected by a two-window ratio test on the most recent
eight series points: geometric mean of the last four over the four before,
alerting when the ratio clears the configured factor and the two windows'
pooled intervals do not overlap. Ratios are scale free, so recalibrating
units can never flip an alert decision. Improvement never alerts.

Alerts also arise from active impairment screens: a flagged screen is
exactly the situation the parent app exists to surface, and a child whose
very first session already shows a deficit has no usable history yet.
"""

import math
from dataclasses import dataclass

from .config import AlertConfig
from .errors import NotFound, OutOfOrder
from .jsonutil import canonical_dumps
from .psychometrics import PsychometricFit
from .screens import KIND_NO_FLAG, ScreenResult

RECOMMENDATIONS = {
    "myopia_suspect": "Far-distance detail recognition looks reduced and/or the child sits unusually close to the screen. Consider an eye exam for short-sightedness.",
    "hyperopia_suspect": "Near-distance detail recognition looks reduced and/or the child sits unusually far from the screen. Consider an eye exam for far-sightedness.",
    "astigmatism_suspect": "Pattern recognition differs strongly between orientations. Consider an eye exam for astigmatism.",
    "cvd_suspect": "Color discrimination along one color axis is much weaker than the others. Consider a color-vision exam.",
    "nyctalopia_suspect": "Dim-light detection is disproportionately weak compared to daylight performance. Consider an eye exam for night blindness.",
    "deterioration": "This channel's threshold has recently worsened. Consider scheduling an eye exam.",
}


@dataclass(frozen=True)
class SeriesPoint:
    timestamp_ms: int
    threshold: float          # linear channel units
    ci: tuple                 # (low, high) linear

    def to_json(self) -> dict:
        return {
            "timestamp_ms": self.timestamp_ms,
            "threshold": self.threshold,
            "ci": list(self.ci),
        }


@dataclass(frozen=True)
class EstimateSeries:
    child_id: str
    channel: str
    condition_bin: str
    points: tuple = ()

    def to_json(self) -> dict:
        return {
            "child_id": self.child_id,
            "channel": self.channel,
            "condition_bin": self.condition_bin,
            "points": [p.to_json() for p in self.points],
        }


@dataclass(frozen=True)
class Alert:
    child_id: str
    channel: str
    window: tuple             # (t_start_ms, t_end_ms)
    effect_size: float
    recommendation_text: str
    kind: str = "deterioration"

    def to_json(self) -> dict:
        return {
            "child_id": self.child_id,
            "channel": self.channel,
            "window": list(self.window),
            "effect_size": self.effect_size,
            "recommendation_text": self.recommendation_text,
            "kind": self.kind,
        }


def update_series(
    series: EstimateSeries, fit: PsychometricFit, timestamp_ms: int
) -> EstimateSeries:
    """Append one fitted threshold; timestamps must strictly increase."""
    if series.points and timestamp_ms <= series.points[-1].timestamp_ms:
        raise OutOfOrder(
            f"timestamp {timestamp_ms} not after {series.points[-1].timestamp_ms}"
        )
    point = SeriesPoint(
        timestamp_ms=timestamp_ms,
        threshold=fit.threshold_linear,
        ci=fit.ci_linear,
    )
    return EstimateSeries(
        child_id=series.child_id,
        channel=series.channel,
        condition_bin=series.condition_bin,
        points=series.points + (point,),
    )


def _pooled_log_interval(points, z: float) -> tuple:
    """Window mean on the log10 scale with meta-analytically pooled width.

    Each point contributes its own interval's standard error; the pooled
    half width shrinks with the window size. Window-to-window scatter is
    deliberately not estimated here: with 3 degrees of freedom it is so
    noisy that it porously widens or collapses the gate at random.
    """
    n = len(points)
    logs = [math.log10(p.threshold) for p in points]
    mean = sum(logs) / n
    meas_sd = [
        (math.log10(p.ci[1]) - math.log10(p.ci[0])) / 2.0 / 1.96 for p in points
    ]
    meas_var = sum(s * s for s in meas_sd) / n
    half = z * math.sqrt(meas_var / n)
    return mean - half, mean + half


def detect_change(series: EstimateSeries, cfg: AlertConfig | None = None):
    """Alert when the recent window deteriorated versus the baseline window.

    With exactly the minimum history this is a last-4 vs previous-4
    comparison; as history accumulates the baseline window extends (capped)
    so its mean firms up. A 4-vs-4 comparison alone cannot reach the target
    detection power at the target false-alarm rate: the baseline is as
    noisy as the signal window.
    """
    cfg = cfg or AlertConfig()
    if len(series.points) < cfg.min_points:
        return None
    recent = series.points[-cfg.window:]
    previous = series.points[-(cfg.window + cfg.baseline_cap): -cfg.window]
    geo = lambda pts: 10.0 ** (sum(math.log10(p.threshold) for p in pts) / len(pts))
    ratio = geo(recent) / geo(previous)
    if ratio < cfg.ratio:
        return None
    prev_lo, prev_hi = _pooled_log_interval(previous, cfg.ci_z)
    rec_lo, rec_hi = _pooled_log_interval(recent, cfg.ci_z)
    if rec_lo <= prev_hi:
        return None
    return Alert(
        child_id=series.child_id,
        channel=series.channel,
        window=(recent[0].timestamp_ms, recent[-1].timestamp_ms),
        effect_size=ratio - 1.0,
        recommendation_text=RECOMMENDATIONS["deterioration"],
    )


def scan_series_alerts(series: EstimateSeries, cfg: AlertConfig | None = None) -> list:
    """Run detection at every prefix; keep rising edges only.

    Consecutive firing prefixes describe the same deterioration event, so
    only the first of each run becomes an alert.
    """
    cfg = cfg or AlertConfig()
    alerts = []
    firing_prev = False
    for end in range(cfg.min_points, len(series.points) + 1):
        prefix = EstimateSeries(
            child_id=series.child_id,
            channel=series.channel,
            condition_bin=series.condition_bin,
            points=series.points[:end],
        )
        alert = detect_change(prefix, cfg)
        if alert is not None and not firing_prev:
            alerts.append(alert)
        firing_prev = alert is not None
    return alerts


def screen_alerts(child_id: str, screen_results: dict, window: tuple) -> list:
    """One alert per active impairment screen."""
    alerts = []
    for channel, result in sorted(screen_results.items()):
        if not isinstance(result, ScreenResult) or result.kind == KIND_NO_FLAG:
            continue
        alerts.append(
            Alert(
                child_id=child_id,
                channel=channel,
                window=window,
                effect_size=result.effect_size,
                recommendation_text=RECOMMENDATIONS[result.kind],
                kind=result.kind,
            )
        )
    return alerts


def build_report(
    child_id: str,
    series_by_key: dict,
    screen_results: dict,
    alerts: list,
    fits_by_key: dict | None = None,
    trial_counts: dict | None = None,
) -> dict:
    """Assemble the parent-facing report document (deterministic bytes)."""
    if child_id is None:
        raise NotFound("child id required")
    return {
        "v": 1,
        "child_id": child_id,
        "trial_counts": dict(sorted((trial_counts or {}).items())),
        "fits": {k: fits_by_key[k].to_json() for k in sorted(fits_by_key or {})},
        "series": {k: series_by_key[k].to_json() for k in sorted(series_by_key or {})},
        "screens": {k: screen_results[k].to_json() for k in sorted(screen_results or {})},
        "alerts": [a.to_json() for a in alerts],
    }


def report_bytes(report: dict) -> bytes:
    return canonical_dumps(report).encode("utf-8")
