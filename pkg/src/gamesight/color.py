"""Isoluminant cone-contrast color pairs for the color-vision probes.

A probe color is the background displaced in cone-excitation space along
the direction that targets one cone class (protan, deutan or tritan axis)
while silencing luminance, so only chromatic information distinguishes
target from background. Cone excitations come from a fixed 3x3 linear
transform of linear RGB; the default composes the sRGB primaries with the
Hunt-Pointer-Estevez cone fundamentals. Displacement magnitude is the
Euclidean norm of the displacement expressed in cone-contrast coordinates
(delta/background per cone).
"""

import numpy as np

from .errors import GamutExceeded

# linear sRGB -> CIE XYZ (D65 white)
RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)

# XYZ -> LMS, Hunt-Pointer-Estevez fundamentals
XYZ_TO_LMS = np.array(
    [
        [0.38971, 0.68898, -0.07868],
        [-0.22981, 1.18340, 0.04641],
        [0.00000, 0.00000, 1.00000],
    ]
)

RGB_TO_LMS = XYZ_TO_LMS @ RGB_TO_XYZ
LMS_TO_RGB = np.linalg.inv(RGB_TO_LMS)

# Luminance (the Y row) expressed in LMS coordinates; the S coefficient is
# numerically ~1e-5, i.e. S-cone modulation is already nearly luminance-silent.
Y_IN_LMS = RGB_TO_XYZ[1] @ LMS_TO_RGB

AXES = ("protan", "deutan", "tritan")

GAMUT_EPS = 1e-9

DEFAULT_BACKGROUND = (0.5, 0.5, 0.5)


def luminance(rgb) -> float:
    """Relative luminance (Y) of a linear RGB triple."""
    return float(RGB_TO_XYZ[1] @ np.asarray(rgb, dtype=float))


def _unit_displacement(axis: str, lms_bg: np.ndarray) -> np.ndarray:
    """LMS displacement with unit cone-contrast norm and zero luminance change."""
    a, b, c = Y_IN_LMS
    if axis == "protan":
        d = np.array([1.0, -a / b, 0.0])
    elif axis == "deutan":
        d = np.array([-b / a, 1.0, 0.0])
    elif axis == "tritan":
        d = np.array([0.0, -c / b, 1.0])
    else:
        raise ValueError(f"unknown color axis: {axis!r}")
    return d / np.linalg.norm(d / lms_bg)


def color_axis_colors(axis: str, contrast: float, background=DEFAULT_BACKGROUND):
    """Target and background linear-RGB triples for one color probe.

    Raises GamutExceeded when the excursion leaves [0,1]^3.
    """
    if contrast < 0:
        raise ValueError("contrast must be nonnegative")
    bg = np.asarray(background, dtype=float)
    if np.any(bg < 0) or np.any(bg > 1):
        raise GamutExceeded(f"background outside gamut: {bg.tolist()}")
    lms_bg = RGB_TO_LMS @ bg
    target = LMS_TO_RGB @ (lms_bg + contrast * _unit_displacement(axis, lms_bg))
    if np.any(target < -GAMUT_EPS) or np.any(target > 1 + GAMUT_EPS):
        raise GamutExceeded(
            f"{axis} contrast {contrast} from {bg.tolist()} leaves gamut: {target.tolist()}"
        )
    target = np.clip(target, 0.0, 1.0)
    return tuple(float(v) for v in target), tuple(float(v) for v in bg)


def max_in_gamut_contrast(axis: str, background=DEFAULT_BACKGROUND) -> float:
    """Largest cone contrast whose target color stays inside the RGB cube.

    The target is linear in contrast, so the bound is a per-channel ray/box
    intersection in closed form.
    """
    bg = np.asarray(background, dtype=float)
    lms_bg = RGB_TO_LMS @ bg
    drgb = LMS_TO_RGB @ _unit_displacement(axis, lms_bg)
    limit = np.inf
    for i in range(3):
        if drgb[i] > 1e-12:
            limit = min(limit, (1.0 - bg[i]) / drgb[i])
        elif drgb[i] < -1e-12:
            limit = min(limit, (0.0 - bg[i]) / drgb[i])
    return float(limit)
