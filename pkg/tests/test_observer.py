import dataclasses
import math

import numpy as np
import pytest

from gamesight.errors import InfeasibleStimulus
from gamesight.jsonutil import canonical_dumps
from gamesight.observer import (
    BLUR_ARCMIN_PER_MM_DIOPTER,
    FIXTURE_PROFILES,
    ImpairmentProfile,
    defocus_diopters,
    effective_threshold,
    p_correct,
    preferred_distance,
    respond,
    run_session,
)
from gamesight.stimulus import Channel, make_stimulus
from tests.conftest import make_view


def test_blur_constant_rederivation():
    # geometric identity: blur angle (rad) ~ pupil (m) x defocus (D)
    derived = 0.001 * (180.0 / math.pi) * 60.0  # 1 mm pupil, 1 D
    assert BLUR_ARCMIN_PER_MM_DIOPTER == pytest.approx(derived, abs=0.01)


def test_defocus_examples():
    emmetrope = ImpairmentProfile()
    assert defocus_diopters(emmetrope, 0.7) == 0.0
    myope = ImpairmentProfile(sphere_d=-2.0)
    assert defocus_diopters(myope, 1.0) == pytest.approx(1.0)
    assert defocus_diopters(myope, 0.4) == 0.0  # 1/0.4 = 2.5 >= 2
    hyperope = ImpairmentProfile(sphere_d=6.0, accommodation_d=8.0)
    assert defocus_diopters(hyperope, 0.33) == pytest.approx(1.03, abs=0.01)


def test_emmetrope_zero_defocus_everywhere_beyond_near_point():
    emmetrope = ImpairmentProfile()
    for d in np.linspace(1.0 / emmetrope.accommodation_d, 3.0, 50):
        assert defocus_diopters(emmetrope, float(d)) == 0.0


def test_effective_threshold_examples():
    baseline = ImpairmentProfile()
    view = make_view(1000.0, 300.0)
    assert effective_threshold(baseline, Channel.acuity(), view) == pytest.approx(1.0)
    # 2 D defocus with a 4 mm pupil: blur 27.52', quadrature with 1'
    myope = ImpairmentProfile(sphere_d=-3.0)
    e = defocus_diopters(myope, 1.0)
    assert e == pytest.approx(2.0)
    theta = effective_threshold(myope, Channel.acuity(), view)
    assert theta == pytest.approx(math.hypot(1.0, 27.52), abs=0.01)

    deutan = ImpairmentProfile(cvd_type="deutan", cvd_severity=1.0)
    assert effective_threshold(deutan, Channel.color("deutan"), view) == pytest.approx(0.20)
    assert effective_threshold(deutan, Channel.color("protan"), view) == pytest.approx(0.02)


def test_orientation_threshold_follows_cylinder_axis():
    astig = ImpairmentProfile(cyl_d=1.5, cyl_axis_deg=90.0)
    view = make_view(700.0, 300.0)
    at_axis = effective_threshold(astig, Channel.orientation(90.0), view)
    perpendicular = effective_threshold(astig, Channel.orientation(0.0), view)
    diagonal = effective_threshold(astig, Channel.orientation(45.0), view)
    assert at_axis == pytest.approx(0.02, abs=2e-3)
    assert perpendicular > diagonal > at_axis
    assert perpendicular <= 1.0


def test_scotopic_threshold_scales_with_nyctalopia():
    night = ImpairmentProfile(nyctalopia_factor=3.0)
    view = make_view(700.0, 3.0)
    assert effective_threshold(night, Channel.scotopic(), view) == pytest.approx(0.06)


def test_respond_saturation_and_floor(screen):
    profile = ImpairmentProfile(lapse_lambda=0.0)
    view = make_view(600.0, 300.0)
    theta = effective_threshold(profile, Channel.acuity(), view)
    strong = make_stimulus(Channel.acuity(), 100.0 * theta, screen, view, rng_seed=1)
    assert p_correct(profile, strong, view) >= 0.999
    weak = make_stimulus(Channel.acuity(), 2.0, screen, view, rng_seed=1)
    weak = dataclasses.replace(weak, intensity=1e-6)
    assert p_correct(profile, weak, view) == pytest.approx(0.25, abs=1e-3)


def test_respond_midpoint_frequency(screen):
    profile = ImpairmentProfile()
    view = make_view(600.0, 300.0)
    theta = effective_threshold(profile, Channel.color("deutan"), view)
    spec = make_stimulus(Channel.color("deutan"), theta, screen, view, rng_seed=1)
    expected = 0.25 + (1 - 0.25 - profile.lapse_lambda) / 2.0
    rng = np.random.default_rng(12)
    n = 100_000
    hits = sum(respond(profile, spec, view, rng) == "correct" for _ in range(n))
    assert hits / n == pytest.approx(expected, abs=0.01)


def test_respond_rejects_infeasible(screen):
    profile = ImpairmentProfile()
    view = make_view(600.0, 300.0)
    spec = make_stimulus(Channel.acuity(), 0.5, screen, view, rng_seed=1)
    assert not spec.feasible
    with pytest.raises(InfeasibleStimulus):
        respond(profile, spec, view, np.random.default_rng(0))


def test_monotone_difficulty(screen):
    profile = ImpairmentProfile(sphere_d=-1.0, cvd_type="protan", cvd_severity=0.5)
    view = make_view(800.0, 300.0)
    for channel in (Channel.acuity(), Channel.color("protan"), Channel.orientation(30.0)):
        ps = []
        for factor in (0.25, 0.5, 1.0, 2.0, 4.0):
            theta = effective_threshold(profile, channel, view)
            spec = make_stimulus(channel, theta * factor, screen, view, rng_seed=1)
            ps.append(p_correct(profile, spec, view))
        assert all(b >= a for a, b in zip(ps, ps[1:]))


def test_preferred_distance_emmetrope_mean():
    rng = np.random.default_rng(42)
    profile = ImpairmentProfile()
    samples = [preferred_distance(profile, rng) for _ in range(10_000)]
    assert 0.65 <= float(np.mean(samples)) <= 0.75


def test_preferred_distance_clamps():
    rng = np.random.default_rng(1)
    myope = ImpairmentProfile(sphere_d=-2.0)
    assert all(preferred_distance(myope, rng) <= 0.5 for _ in range(2000))
    hyperope = ImpairmentProfile(sphere_d=6.0, accommodation_d=8.0)
    assert all(preferred_distance(hyperope, rng) >= 0.5 for _ in range(2000))


def test_myope_sits_closer_than_emmetrope():
    rng_a = np.random.default_rng(5)
    rng_b = np.random.default_rng(5)
    emmetrope_mean = float(
        np.mean([preferred_distance(ImpairmentProfile(), rng_a) for _ in range(10_000)])
    )
    myope_mean = float(
        np.mean([preferred_distance(ImpairmentProfile(sphere_d=-2.0), rng_b) for _ in range(10_000)])
    )
    assert myope_mean < 0.5
    assert myope_mean <= 0.8 * emmetrope_mean


def test_far_bin_acuity_threshold_ordered_by_severity():
    # ground-truth far-distance thresholds grow with myopia severity
    view_far = make_view(1200.0, 300.0)
    thresholds = [
        effective_threshold(ImpairmentProfile(sphere_d=s), Channel.acuity(), view_far)
        for s in (0.0, -1.0, -2.0)
    ]
    assert thresholds[0] < thresholds[1] < thresholds[2]


def test_run_session_deterministic_bytes(screen):
    profile = FIXTURE_PROFILES["myope_2d"]
    a = run_session(profile, screen, 120, seed=9)
    b = run_session(profile, screen, 120, seed=9)
    log_a = "".join(r.to_json_line() + "\n" for r in a)
    log_b = "".join(r.to_json_line() + "\n" for r in b)
    assert log_a == log_b
    c = run_session(profile, screen, 120, seed=10)
    assert "".join(r.to_json_line() + "\n" for r in c) != log_a


def test_run_session_single_attempt(screen):
    records = run_session(ImpairmentProfile(), screen, 1, seed=0)
    assert len(records) <= 1
    with pytest.raises(ValueError):
        run_session(ImpairmentProfile(), screen, 0, seed=0)


def test_profile_json_round_trip(tmp_path):
    profile = ImpairmentProfile(sphere_d=-1.5, cvd_type="tritan", cvd_severity=0.4)
    path = tmp_path / "p.json"
    path.write_text(canonical_dumps(profile.to_json()))
    assert ImpairmentProfile.load(str(path)) == profile


def test_profile_validation():
    with pytest.raises(ValueError):
        ImpairmentProfile(cvd_severity=1.5)
    with pytest.raises(ValueError):
        ImpairmentProfile(nyctalopia_factor=0.5)
    with pytest.raises(ValueError):
        ImpairmentProfile(cyl_axis_deg=180.0)
