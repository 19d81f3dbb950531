"""Pure derivation of all screening state from a trial log.

The event log is the source of truth; everything the service serves is a
deterministic function of it, so replaying a log always reproduces the
live report byte for byte.

Fit bins: acuity thresholds are fitted per distance bin under photopic
light (that is what the refraction ratio needs) plus pooled across
distances for the night-vision reference; color, orientation and scotopic
channels are distance invariant (angular sizes are fixed), so they pool
across distance. Mesopic trials never enter any fit, and no-response
trials are excluded as inattention.
"""

import statistics

from .config import AppConfig
from .errors import InsufficientData
from .monitor import (
    EstimateSeries,
    build_report,
    scan_series_alerts,
    screen_alerts,
    update_series,
)
from .psychometrics import fit_psychometric
from .screens import DistanceStats, astigmatism_index, cvd_classify, refraction_screen, scotopic_ratio
from .session import (
    BIN_PHOTOPIC,
    BIN_SCOTOPIC,
    RESPONSE_CORRECT,
    RESPONSE_NO_RESPONSE,
    bin_view,
)
from .stimulus import CHANNEL_ACUITY, CHANNEL_COLOR, CHANNEL_ORIENTATION, CHANNEL_SCOTOPIC


def fit_bins_for(record) -> list:
    """(channel_key, condition_bin) cells this trial may contribute to."""
    dbin, abin = bin_view(record.view)
    kind = record.spec.channel.kind
    key = record.spec.channel.key()
    if kind == CHANNEL_ACUITY and abin == BIN_PHOTOPIC:
        return [(key, f"{dbin}|{BIN_PHOTOPIC}"), (key, BIN_PHOTOPIC)]
    if kind in (CHANNEL_COLOR, CHANNEL_ORIENTATION) and abin == BIN_PHOTOPIC:
        return [(key, BIN_PHOTOPIC)]
    if kind == CHANNEL_SCOTOPIC and abin == BIN_SCOTOPIC:
        return [(key, BIN_SCOTOPIC)]
    return []


def collect_fit_inputs(records) -> dict:
    """(channel_key, condition_bin) -> list of (intensity, correct)."""
    cells = {}
    for rec in records:
        if rec.response == RESPONSE_NO_RESPONSE:
            continue
        for cell in fit_bins_for(rec):
            cells.setdefault(cell, []).append(
                (rec.spec.intensity, rec.response == RESPONSE_CORRECT)
            )
    return cells


def compute_fits(records, cfg: AppConfig, cache: dict | None = None) -> dict:
    """"channel|bin" -> PsychometricFit for every cell with enough data.

    cache maps identical trial sets to their fit; a single-session log hits
    it for every cell when the series pass re-derives per-session fits.
    """
    m = cfg.session.alphabet_size
    fits = {}
    for (key, cbin), trials in collect_fit_inputs(records).items():
        cache_key = (m, tuple(trials))
        if cache is not None and cache_key in cache:
            fit = cache[cache_key]
        else:
            try:
                fit = fit_psychometric(trials, m, cfg.fit)
            except InsufficientData:
                fit = None
            if cache is not None:
                cache[cache_key] = fit
        if fit is not None:
            fits[f"{key}|{cbin}"] = fit
    return fits


def compute_screens(records, fits: dict, cfg: AppConfig) -> dict:
    """Run every impairment screen that has enough evidence."""
    rules = cfg.screen_rules
    results = {}

    distances = [r.view.distance_mm for r in records]
    if distances:
        stats = DistanceStats(
            mean_mm=statistics.fmean(distances),
            sd_mm=statistics.pstdev(distances) if len(distances) > 1 else 0.0,
            n=len(distances),
        )
        by_bin = {}
        for dbin in ("near", "mid", "far"):
            fit = fits.get(f"acuity|{dbin}|{BIN_PHOTOPIC}")
            if fit is not None:
                by_bin[dbin] = fit
        try:
            results["refraction"] = refraction_screen(by_bin, stats, rules)
        except InsufficientData:
            pass

    by_axis = {}
    for axis in ("protan", "deutan", "tritan"):
        fit = fits.get(f"color:{axis}|{BIN_PHOTOPIC}")
        if fit is not None:
            by_axis[axis] = fit
    try:
        results["color_vision"] = cvd_classify(by_axis, rules)
    except InsufficientData:
        pass

    by_orientation = {}
    for key, fit in fits.items():
        name, _, cbin = key.partition("|")
        if name.startswith("orientation:") and cbin == BIN_PHOTOPIC:
            by_orientation[float(name.split(":", 1)[1])] = fit
    try:
        results["astigmatism"] = astigmatism_index(by_orientation, rules)
    except InsufficientData:
        pass

    phot = fits.get(f"acuity|{BIN_PHOTOPIC}")
    scot = fits.get(f"scotopic|{BIN_SCOTOPIC}")
    if phot is not None and scot is not None:
        results["night_vision"] = scotopic_ratio(phot, scot, rules)
    return results


def compute_series(child_id: str, records, cfg: AppConfig, cache: dict | None = None) -> dict:
    """Per-session fits appended in session order, per channel cell."""
    sessions = {}
    for rec in records:
        sessions.setdefault(rec.session_id, []).append(rec)
    ordered = sorted(sessions.values(), key=lambda recs: recs[0].view.timestamp_ms)
    series = {}
    for recs in ordered:
        stamp = recs[-1].view.timestamp_ms
        for key, fit in compute_fits(recs, cfg, cache).items():
            name, _, cbin = key.partition("|")
            if key not in series:
                series[key] = EstimateSeries(
                    child_id=child_id, channel=name, condition_bin=cbin
                )
            series[key] = update_series(series[key], fit, stamp)
    return series


def derive_state(child_id: str, records, cfg: AppConfig | None = None) -> dict:
    """Full derived state: the report document for one child's log."""
    cfg = cfg or AppConfig()
    records = sorted(records, key=lambda r: (r.view.timestamp_ms, r.session_id, r.trial_id))
    cache: dict = {}
    fits = compute_fits(records, cfg, cache)
    screens = compute_screens(records, fits, cfg)
    series = compute_series(child_id, records, cfg, cache)

    alerts = []
    for key in sorted(series):
        alerts.extend(scan_series_alerts(series[key], cfg.alerts))
    if records:
        window = (records[0].view.timestamp_ms, records[-1].view.timestamp_ms)
        alerts.extend(screen_alerts(child_id, screens, window))
    alerts.sort(key=lambda a: (a.window[1], a.channel, a.kind))

    counts = {}
    for rec in records:
        key = rec.spec.channel.key()
        counts[key] = counts.get(key, 0) + 1

    return build_report(
        child_id,
        series_by_key=series,
        screen_results=screens,
        alerts=alerts,
        fits_by_key=fits,
        trial_counts=counts,
    )
