"""Spectral overlap analysis and decay-law fitting.

The local density of states (LDOS) between a map and its perturbed twin bins
the overlap weight ``|<v_m|v'_n>|^2`` of every eigenvector pair by the wrapped
eigenangle difference ``phi_m - phi'_n``.  A Lorentzian LDOS signals a
delocalizing perturbation and exponential echo decay at the Lorentzian width;
a Gaussian-like LDOS signals a localized perturbation.  Echo curves themselves
are classified by the curvature of ``ln F(t)`` over the fit window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .echo import FidelityCurve
from .matops import check_unitary, eig_unitary

#: Default histogram bin count; odd so that one bin is centered on zero.
DEFAULT_LDOS_BINS = 201

#: Dimensionless curvature-ratio threshold separating "exponential" from the
#: faster/slower labels; chosen so exponentials with percent-level noise at
#: typical trial counts still classify as exponential.
CURVATURE_RATIO_THRESHOLD = 0.15

DECAY_LABELS = ("exponential", "faster_than_exponential", "slower_than_exponential")


class FitError(RuntimeError):
    """A least-squares fit failed to converge; carries the diagnostics."""


@dataclass(frozen=True)
class LdosHistogram:
    """Normalized overlap-weight density over eigenangle differences."""

    bin_edges: np.ndarray  # n_bins + 1 edges spanning [-pi, pi)
    densities: np.ndarray
    dim: int

    @property
    def bin_centers(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2

    @property
    def bin_width(self) -> float:
        return float(self.bin_edges[1] - self.bin_edges[0])


@dataclass(frozen=True)
class LdosFit:
    """A fitted line shape: ``model`` is ``lorentzian`` (width = FWHM) or
    ``gaussian`` (width = sigma)."""

    model: str
    width: float
    center: float
    rss: float


@dataclass(frozen=True)
class DecayFit:
    """Log-domain fit of an echo curve over ``[t_lo, t_hi]``.

    ``rate`` is minus the slope of the linear fit to ``ln F``; ``c2`` is the
    quadratic coefficient of the quadratic fit on the same window, whose sign
    distinguishes faster (negative) from slower (positive) than exponential.
    ``model`` holds the classification label.
    """

    model: str
    rate: float
    c2: float
    r_squared: float
    window: tuple
    curvature_ratio: float


def wrap_angle(x):
    """Wrap angles to ``[-pi, pi)``."""
    return (np.asarray(x) + np.pi) % (2.0 * np.pi) - np.pi


def ldos(u: np.ndarray, u_p: np.ndarray, n_bins: int = DEFAULT_LDOS_BINS) -> LdosHistogram:
    """Local density of states between ``u`` and its perturbed twin ``u_p``.

    All ``N^2`` eigenvector pairs contribute weight ``|<v_m|v'_n>|^2`` at the
    wrapped difference of their eigenangles; the raw mass ``N`` is normalized
    to total density one.
    """
    u = check_unitary(u)
    u_p = check_unitary(u_p)
    if u.shape != u_p.shape:
        raise ValueError(f"operators must match in dimension, got {u.shape} and {u_p.shape}")
    if n_bins < 1:
        raise ValueError(f"need at least one bin, got {n_bins}")
    base = eig_unitary(u)
    pert = eig_unitary(u_p)
    weights = np.abs(base.vectors.conj().T @ pert.vectors) ** 2
    dphi = wrap_angle(base.values[:, None] - pert.values[None, :])
    edges = np.linspace(-np.pi, np.pi, n_bins + 1)
    mass, _ = np.histogram(dphi.ravel(), bins=edges, weights=weights.ravel())
    dim = u.shape[0]
    densities = mass / (dim * (edges[1] - edges[0]))
    return LdosHistogram(bin_edges=edges, densities=densities, dim=dim)


def average_histograms(histograms) -> LdosHistogram:
    """Mean of same-binning normalized histograms (still integrates to one)."""
    histograms = list(histograms)
    if not histograms:
        raise ValueError("no histograms given")
    edges = histograms[0].bin_edges
    for h in histograms[1:]:
        if not np.array_equal(h.bin_edges, edges):
            raise ValueError("histograms must share bin edges")
    stacked = np.vstack([h.densities for h in histograms])
    return LdosHistogram(
        bin_edges=edges,
        densities=stacked.mean(axis=0),
        dim=histograms[0].dim,
    )


def lorentzian_pdf(x, width, center):
    """Normalized Lorentzian with full width at half maximum ``width``."""
    half = width / 2.0
    return half / np.pi / ((np.asarray(x) - center) ** 2 + half**2)


def gaussian_pdf(x, sigma, center):
    return np.exp(-((np.asarray(x) - center) ** 2) / (2.0 * sigma**2)) / (
        sigma * np.sqrt(2.0 * np.pi)
    )

_LDOS_MODELS = {"lorentzian": lorentzian_pdf, "gaussian": gaussian_pdf}


def fit_ldos(hist: LdosHistogram, model: str) -> LdosFit:
    """Least-squares fit of a normalized line shape to the binned densities.

    The width is bounded below by one bin width, so a delta-spike histogram
    fits at the resolution floor instead of collapsing.  Non-convergence
    raises ``FitError`` with the starting point and bounds.
    """
    if model not in _LDOS_MODELS:
        raise ValueError(f"model must be one of {sorted(_LDOS_MODELS)}, got {model!r}")
    shape = _LDOS_MODELS[model]
    x = hist.bin_centers
    y = hist.densities
    total = y.sum() * hist.bin_width
    if not np.isclose(total, 1.0, atol=1e-6):
        raise ValueError(f"histogram is not normalized (total mass {total:.6f})")
    center0 = float(np.sum(x * y) * hist.bin_width)
    spread = float(np.sqrt(np.sum((x - center0) ** 2 * y) * hist.bin_width))
    width0 = np.clip(spread, hist.bin_width, np.pi)
    bounds = ([hist.bin_width, -np.pi], [4.0 * np.pi, np.pi])
    try:
        popt, _ = curve_fit(
            shape, x, y, p0=[width0, np.clip(center0, -np.pi, np.pi)], bounds=bounds
        )
    except RuntimeError as exc:
        raise FitError(
            f"{model} fit did not converge (start width {width0:.4g}, "
            f"center {center0:.4g}, bounds {bounds}): {exc}"
        ) from exc
    rss = float(np.sum((shape(x, *popt) - y) ** 2))
    return LdosFit(model=model, width=float(popt[0]), center=float(popt[1]), rss=rss)


def _fit_window(curve: FidelityCurve, f_floor: float):
    """Indices of the fit window: kick 1 through the last kick with F >= floor."""
    values = np.asarray(curve.values)
    above = np.nonzero(values >= f_floor)[0]
    if above.size == 0 or above[-1] < 1:
        raise ValueError(f"no usable points at or above f_floor = {f_floor}")
    hi = int(above[-1])
    if hi < 5:
        raise ValueError(
            f"fit window too short: only {hi} points from kick 1 to the last "
            f"crossing of f_floor = {f_floor} (need at least 5)"
        )
    return np.arange(1, hi + 1)


def fit_exponential_decay(
    curve: FidelityCurve,
    f_floor: float = 0.01,
    threshold: float = CURVATURE_RATIO_THRESHOLD,
) -> DecayFit:
    """Fit ``ln F(t)`` on the window from kick 1 to the last ``F >= f_floor``.

    Returns the exponential rate (minus the linear slope), the quadratic
    curvature ``c2`` on the same window, the linear fit's ``r^2``, and the
    classification label (see ``classify_decay``).
    """
    idx = _fit_window(curve, f_floor)
    t = np.asarray(curve.steps, dtype=float)[idx]
    f = np.asarray(curve.values)[idx]
    if np.any(f <= 0.0):
        raise ValueError("fidelity reached zero inside the fit window; cannot take logs")
    log_f = np.log(f)

    slope, intercept = np.polyfit(t, log_f, 1)
    residuals = log_f - (slope * t + intercept)
    total = np.sum((log_f - log_f.mean()) ** 2)
    r_squared = 1.0 if total == 0.0 else 1.0 - float(np.sum(residuals**2) / total)

    c2, c1, _ = np.polyfit(t, log_f, 2)
    window = (float(t[0]), float(t[-1]))
    span = window[1] - window[0]
    linear_scale = abs(c1) * span
    curvature_scale = abs(c2) * span**2
    if linear_scale == 0.0:
        ratio = np.inf if curvature_scale > 0 else 0.0
    else:
        ratio = curvature_scale / linear_scale
    if ratio <= threshold:
        label = "exponential"
    elif c2 < 0:
        label = "faster_than_exponential"
    else:
        label = "slower_than_exponential"
    return DecayFit(
        model=label,
        rate=float(-slope),
        c2=float(c2),
        r_squared=r_squared,
        window=window,
        curvature_ratio=float(ratio),
    )


def classify_decay(
    curve: FidelityCurve,
    f_floor: float = 0.01,
    threshold: float = CURVATURE_RATIO_THRESHOLD,
) -> str:
    """Label a curve ``exponential``, ``faster_than_exponential`` or
    ``slower_than_exponential`` by the dimensionless curvature of ``ln F``."""
    return fit_exponential_decay(curve, f_floor, threshold).model
