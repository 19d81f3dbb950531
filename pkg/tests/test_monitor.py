import math

import numpy as np
import pytest

from gamesight.config import AlertConfig
from gamesight.errors import OutOfOrder
from gamesight.jsonutil import canonical_dumps
from gamesight.monitor import (
    Alert,
    EstimateSeries,
    SeriesPoint,
    build_report,
    detect_change,
    scan_series_alerts,
    screen_alerts,
    update_series,
)
from gamesight.psychometrics import PsychometricFit
from gamesight.screens import ScreenResult

CFG = AlertConfig()


def fit_at(threshold):
    alpha = math.log10(threshold)
    return PsychometricFit(
        threshold_alpha=alpha,
        slope_beta=8.0,
        guess_gamma=0.25,
        lapse_lambda=0.02,
        ci_alpha=(alpha - 0.05, alpha + 0.05),
        n_trials=60,
        floor_flag=False,
        ceiling_flag=False,
        level_min=threshold / 4,
        level_max=threshold * 4,
        log_likelihood=-25.0,
    )


def series_from_values(values, ci_halfwidth_log=0.05):
    points = tuple(
        SeriesPoint(
            timestamp_ms=(i + 1) * 1000,
            threshold=v,
            ci=(v * 10 ** -ci_halfwidth_log, v * 10 ** ci_halfwidth_log),
        )
        for i, v in enumerate(values)
    )
    return EstimateSeries(child_id="c", channel="acuity", condition_bin="photopic", points=points)


def test_update_series_appends():
    series = EstimateSeries("c", "acuity", "photopic")
    series = update_series(series, fit_at(1.0), 1000)
    assert len(series.points) == 1
    series = update_series(series, fit_at(1.1), 2000)
    assert [p.timestamp_ms for p in series.points] == [1000, 2000]


def test_update_series_rejects_out_of_order():
    series = update_series(EstimateSeries("c", "acuity", "photopic"), fit_at(1.0), 1000)
    with pytest.raises(OutOfOrder):
        update_series(series, fit_at(1.0), 1000)
    with pytest.raises(OutOfOrder):
        update_series(series, fit_at(1.0), 500)


def test_replay_of_identical_fits_is_byte_identical():
    def build():
        s = EstimateSeries("c", "acuity", "photopic")
        for i, t in enumerate((1.0, 1.1, 0.9, 1.05)):
            s = update_series(s, fit_at(t), (i + 1) * 1000)
        return canonical_dumps(s.to_json())

    assert build() == build()


def test_constant_series_never_alerts():
    series = series_from_values([1.0] * 20)
    assert detect_change(series, CFG) is None


def test_too_few_points_never_alert():
    series = series_from_values([1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0])
    assert len(series.points) < CFG.min_points
    assert detect_change(series, CFG) is None


def test_step_alerts_and_improvement_does_not():
    worse = series_from_values([1.0] * 6 + [2.0] * 4)
    alert = detect_change(worse, CFG)
    assert alert is not None
    assert alert.effect_size == pytest.approx(1.0, abs=0.01)
    assert alert.window == (7000, 10000)
    better = series_from_values([2.0] * 6 + [1.0] * 4)
    assert detect_change(better, CFG) is None


def test_alert_scale_invariance():
    base = [1.0] * 6 + [2.0] * 4
    for c in (0.02, 5.0):
        scaled = series_from_values([v * c for v in base])
        assert detect_change(scaled, CFG) is not None


def test_step_detection_small_monte_carlo():
    rng = np.random.default_rng(0)
    detected_within = 0
    for _ in range(40):
        values = [1.0 * 10 ** rng.normal(0, 0.1) for _ in range(9)]
        values += [2.0 * 10 ** rng.normal(0, 0.1) for _ in range(6)]
        first = None
        for t in range(CFG.min_points, len(values) + 1):
            if detect_change(series_from_values(values[:t]), CFG) is not None:
                first = t
                break
        if first is not None and first <= 15:
            detected_within += 1
    assert detected_within >= 36  # &gt;= 90% locally; acceptance runs 200 seeds


def test_null_false_alarms_small_monte_carlo():
    rng = np.random.default_rng(1)
    false_runs = 0
    for _ in range(40):
        values = [1.0 * 10 ** rng.normal(0, 0.1) for _ in range(100)]
        fired = any(
            detect_change(series_from_values(values[:t]), CFG) is not None
            for t in range(CFG.min_points, len(values) + 1)
        )
        false_runs += fired
    assert false_runs <= 4


def test_scan_series_alerts_rising_edge_only():
    values = [1.0] * 8 + [2.0] * 8
    series = series_from_values(values)
    alerts = scan_series_alerts(series, CFG)
    assert len(alerts) == 1


def test_screen_alerts_only_for_flags():
    screens = {
        "refraction": ScreenResult("myopia_suspect", 1.7, {}),
        "color_vision": ScreenResult("no_flag", 0.2, {}),
    }
    alerts = screen_alerts("c", screens, (0, 99))
    assert len(alerts) == 1
    assert alerts[0].kind == "myopia_suspect"
    assert "short-sight" in alerts[0].recommendation_text


def test_build_report_deterministic_and_structured():
    series = {"acuity|photopic": series_from_values([1.0, 1.1] * 5)}
    screens = {"refraction": ScreenResult("no_flag", 0.1, {"ratio_far_over_near": 1.1})}
    alerts = [
        Alert("c", "acuity", (1000, 2000), 0.8, "check", kind="deterioration"),
    ]
    fits = {"acuity|photopic": fit_at(1.05)}
    a = build_report("c", series, screens, alerts, fits, {"acuity": 120})
    b = build_report("c", series, screens, alerts, fits, {"acuity": 120})
    assert canonical_dumps(a) == canonical_dumps(b)
    assert a["v"] == 1
    assert a["child_id"] == "c"
    assert a["trial_counts"] == {"acuity": 120}
    assert list(a["screens"]) == ["refraction"]


def test_empty_report():
    report = build_report("c", {}, {}, [], {}, {})
    assert report["series"] == {} and report["alerts"] == []
