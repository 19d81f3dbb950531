"""Maximum-likelihood psychometric fits per channel and condition bin.

Model: P(correct | x) = gamma + (1 - gamma - lambda) * L((log10 x - alpha) * beta)
with L the standard logistic, gamma fixed at 1/m by the m-alternative
paradigm and lambda capped at 0.06. Optimization is a coarse grid over
(alpha, beta, lambda) followed by local refinement; the refined point is
only accepted if it does not lose likelihood against the grid, so the
returned parameters dominate every grid point by construction.

Confidence intervals come from a nonparametric bootstrap refit on the grid
(200 resamples by default), seeded deterministically from the trial data so
replayed logs reproduce identical fits byte for byte.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .config import FitConfig
from .errors import InsufficientData
from .jsonutil import stable_seed

_P_EPS = 1e-9


@dataclass(frozen=True)
class PsychometricFit:
    """Threshold estimate for one channel x condition bin."""

    threshold_alpha: float        # log10 intensity at the logistic midpoint
    slope_beta: float
    guess_gamma: float
    lapse_lambda: float
    ci_alpha: tuple               # 95% bootstrap interval, log10 scale
    n_trials: int
    floor_flag: bool
    ceiling_flag: bool
    level_min: float              # lowest / highest intensity actually tested
    level_max: float
    log_likelihood: float

    @property
    def threshold_linear(self) -> float:
        return 10.0 ** self.threshold_alpha

    @property
    def ci_linear(self) -> tuple:
        return (10.0 ** self.ci_alpha[0], 10.0 ** self.ci_alpha[1])

    def to_json(self) -> dict:
        return {
            "threshold_alpha": self.threshold_alpha,
            "slope_beta": self.slope_beta,
            "guess_gamma": self.guess_gamma,
            "lapse_lambda": self.lapse_lambda,
            "ci_alpha": list(self.ci_alpha),
            "n_trials": self.n_trials,
            "floor_flag": self.floor_flag,
            "ceiling_flag": self.ceiling_flag,
            "level_min": self.level_min,
            "level_max": self.level_max,
            "log_likelihood": self.log_likelihood,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PsychometricFit":
        return cls(
            threshold_alpha=float(obj["threshold_alpha"]),
            slope_beta=float(obj["slope_beta"]),
            guess_gamma=float(obj["guess_gamma"]),
            lapse_lambda=float(obj["lapse_lambda"]),
            ci_alpha=tuple(obj["ci_alpha"]),
            n_trials=int(obj["n_trials"]),
            floor_flag=bool(obj["floor_flag"]),
            ceiling_flag=bool(obj["ceiling_flag"]),
            level_min=float(obj["level_min"]),
            level_max=float(obj["level_max"]),
            log_likelihood=float(obj["log_likelihood"]),
        )


def predicted_p(log_x, alpha, beta, gamma, lapse):
    return gamma + (1.0 - gamma - lapse) * expit((log_x - alpha) * beta)


def log_likelihood(log_levels, k, n, alpha, beta, gamma, lapse) -> float:
    """Bernoulli log-likelihood of aggregated (level, successes, totals)."""
    p = np.clip(predicted_p(log_levels, alpha, beta, gamma, lapse), _P_EPS, 1 - _P_EPS)
    return float(np.sum(k * np.log(p) + (n - k) * np.log(1.0 - p)))


def _aggregate(trials):
    """Sorted unique levels with success/total counts; order invariant.

    Levels are kept exact: the returned likelihood must dominate any grid
    search on the same trials, which only holds when both sides evaluate
    the same likelihood function.
    """
    counts = {}
    for intensity, correct in trials:
        if intensity <= 0:
            raise InsufficientData(f"nonpositive intensity {intensity}")
        cell = counts.setdefault(float(intensity), [0, 0])
        cell[0] += 1 if correct else 0
        cell[1] += 1
    levels = np.array(sorted(counts), dtype=float)
    k = np.array([counts[l][0] for l in levels], dtype=float)
    n = np.array([counts[l][1] for l in levels], dtype=float)
    return levels, k, n


def alpha_grid(levels, cfg: FitConfig) -> np.ndarray:
    lo = math.log10(levels.min()) - cfg.alpha_grid_pad_decades
    hi = math.log10(levels.max()) + cfg.alpha_grid_pad_decades
    return np.linspace(lo, hi, cfg.alpha_grid_points)


def _grid_axes(levels, cfg: FitConfig):
    alphas = alpha_grid(levels, cfg)
    betas = np.array(cfg.beta_grid, dtype=float)
    lapses = np.array(cfg.lapse_grid, dtype=float)
    aa, bb, ll = np.meshgrid(alphas, betas, lapses, indexing="ij")
    return alphas, aa.ravel(), bb.ravel(), ll.ravel()


def _grid_log_p(log_levels, aa, bb, ll, gamma):
    """(grid_points, levels) matrices of log P and log(1-P)."""
    z = (log_levels[None, :] - aa[:, None]) * bb[:, None]
    p = gamma + (1.0 - gamma - ll[:, None]) * expit(z)
    p = np.clip(p, _P_EPS, 1 - _P_EPS)
    return np.log(p), np.log1p(-p)


def _refine(log_levels, k, n, gamma, theta0, ll0, bounds, steps: int = 25):
    """Projected gradient ascent from the best grid point.

    Monotone by construction (backtracking line search, reject on no
    improvement), so the result never falls below the grid optimum. Scales
    are per-parameter: alpha moves in decades, beta multiplicatively,
    lapse in absolute units.
    """

    def ll_and_grad(theta):
        alpha, beta, lapse = theta
        z = (log_levels - alpha) * beta
        sig = expit(z)
        span = 1.0 - gamma - lapse
        p = np.clip(gamma + span * sig, _P_EPS, 1 - _P_EPS)
        ll = float(np.sum(k * np.log(p) + (n - k) * np.log(1.0 - p)))
        dll_dp = k / p - (n - k) / (1.0 - p)
        dsig = sig * (1.0 - sig)
        grad = np.array(
            [
                np.sum(dll_dp * span * dsig * (-beta)),
                np.sum(dll_dp * span * dsig * (log_levels - alpha)),
                np.sum(dll_dp * (-sig)),
            ]
        )
        return ll, grad

    scale = np.array([0.05, theta0[1] * 0.25, 0.01])
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    theta, ll = theta0.astype(float), ll0
    for _ in range(steps):
        _, grad = ll_and_grad(theta)
        norm = np.max(np.abs(grad * scale))
        if norm < 1e-10:
            break
        direction = grad * scale * scale / norm
        improved = False
        t = 1.0
        for _ in range(8):
            cand = np.clip(theta + t * direction, lo, hi)
            cand_ll, _ = ll_and_grad(cand)
            if cand_ll > ll + 1e-12:
                theta, ll = cand, cand_ll
                improved = True
                break
            t *= 0.25
        if not improved:
            break
    return theta, ll


def fit_psychometric(trials, m: int, cfg: FitConfig | None = None) -> PsychometricFit:
    """Fit (alpha, beta, lambda) by MLE with gamma = 1/m fixed.

    trials: iterable of (intensity, correct) pairs. Raises InsufficientData
    below the configured trial/level minima.
    """
    cfg = cfg or FitConfig()
    trials = [(float(x), bool(c)) for x, c in trials]
    if len(trials) < cfg.min_trials:
        raise InsufficientData(f"{len(trials)} trials < minimum {cfg.min_trials}")
    levels, k, n = _aggregate(trials)
    if len(levels) < cfg.min_levels:
        raise InsufficientData(f"{len(levels)} levels < minimum {cfg.min_levels}")
    gamma = 1.0 / m
    log_levels = np.log10(levels)

    alphas, aa, bb, ll = _grid_axes(levels, cfg)
    logp, log1mp = _grid_log_p(log_levels, aa, bb, ll, gamma)
    grid_ll = logp @ k + log1mp @ (n - k)
    best = int(np.argmax(grid_ll))
    alpha0, beta0, lapse0 = aa[best], bb[best], ll[best]
    best_ll = float(grid_ll[best])

    bounds = (
        (alphas[0], alphas[-1]),
        (min(cfg.beta_grid) / 2.0, max(cfg.beta_grid) * 2.0),
        (0.0, cfg.lapse_max),
    )
    refined, final_ll = _refine(
        log_levels, k, n, gamma,
        np.array([alpha0, beta0, lapse0]), best_ll, bounds,
    )
    alpha_hat, beta_hat, lapse_hat = (float(v) for v in refined)

    # bootstrap: multinomial redraws of the aggregated cells, alpha argmax
    # over the grid's alpha axis at the best (beta, lapse) slice
    seed = stable_seed("bootstrap", m, *(f"{l}:{int(ki)}/{int(ni)}" for l, ki, ni in zip(levels, k, n)))
    rng = np.random.default_rng(seed)
    n_slice = len(cfg.beta_grid) * len(cfg.lapse_grid)
    slice_rows = np.arange(len(alphas)) * n_slice + (best % n_slice)
    cells_logp = np.concatenate([logp[slice_rows], log1mp[slice_rows]], axis=1)
    weights = np.concatenate([k, n - k])
    total = int(weights.sum())
    draws = rng.multinomial(total, weights / total, size=cfg.bootstrap_resamples)
    boot_alpha = alphas[np.argmax(draws @ cells_logp.T, axis=1)]
    lo, hi = np.percentile(boot_alpha, [2.5, 97.5])

    # widen by the grid profile-likelihood interval: on separated data the
    # bootstrap collapses to a point even though the likelihood is flat,
    # which would fabricate disjointness in the ratio screens
    profile_ll = grid_ll.reshape(len(alphas), -1).max(axis=1)
    supported = alphas[profile_ll >= best_ll - 1.92]
    lo = min(float(lo), float(supported.min()))
    hi = max(float(hi), float(supported.max()))
    ci = (min(lo, alpha_hat), max(hi, alpha_hat))

    return PsychometricFit(
        threshold_alpha=alpha_hat,
        slope_beta=beta_hat,
        guess_gamma=gamma,
        lapse_lambda=lapse_hat,
        ci_alpha=ci,
        n_trials=len(trials),
        floor_flag=alpha_hat < math.log10(levels.min()),
        ceiling_flag=alpha_hat > math.log10(levels.max()),
        level_min=float(levels.min()),
        level_max=float(levels.max()),
        log_likelihood=final_ll,
    )


def clamped_threshold(fit: PsychometricFit) -> float:
    """Linear threshold clamped to the tested range when the fit railed.

    A floor-flagged fit only supports 'at least as good as the lowest level
    shown'; using the raw extrapolated estimate in screen ratios would
    manufacture evidence out of quantization limits.
    """
    t = fit.threshold_linear
    if fit.floor_flag:
        t = max(t, fit.level_min)
    if fit.ceiling_flag:
        t = min(t, fit.level_max)
    return t


def clamped_ci(fit: PsychometricFit) -> tuple:
    lo, hi = fit.ci_linear
    t = clamped_threshold(fit)
    return (min(max(lo, fit.level_min * 0.5), t), max(min(hi, fit.level_max * 2.0), t))
