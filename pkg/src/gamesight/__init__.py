"""Covert in-game vision screening.

Stimuli in physical visual-angle units, adaptive probe scheduling inside
gameplay, psychometric threshold estimation per impairment channel,
longitudinal change detection with parent alerts, and a simulated child
observer that serves as the end-to-end verification oracle.
"""

__version__ = "0.1.0"

from .config import AppConfig, DEFAULT_SCREEN
from .geometry import ScreenProfile, ViewingSample, arcmin_to_px, px_to_arcmin
from .observer import ImpairmentProfile, run_session
from .psychometrics import PsychometricFit, fit_psychometric
from .session import SessionState, TrialRecord, bin_view
from .stimulus import Channel, StimulusSpec, make_stimulus

__all__ = [
    "AppConfig",
    "Channel",
    "DEFAULT_SCREEN",
    "ImpairmentProfile",
    "PsychometricFit",
    "ScreenProfile",
    "SessionState",
    "StimulusSpec",
    "TrialRecord",
    "ViewingSample",
    "arcmin_to_px",
    "bin_view",
    "fit_psychometric",
    "make_stimulus",
    "px_to_arcmin",
    "run_session",
]
