"""Radius estimation from spectral decay and from moment growth.

Analyticity in a strip of half-width r shows up on the Fourier side as
|u_k| ~ C e^(-r|k|); Gevrey-s regularity as e^(-r|k|^(1/s)).  fit_decay
reads r off a weighted band of the spectrum by least squares.  The dual
estimate fit_moment_radius reads 1/Lambda off the factorial growth
M_j ~ C Lambda^j j! of spectral moments via the ratio test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RadiusEstimate",
    "InsufficientBandError",
    "fit_decay",
    "MomentRadiusEstimate",
    "ZeroMomentError",
    "fit_moment_radius",
]


class InsufficientBandError(RuntimeError):
    """Fewer usable modes above the floor than the fit requires."""


class ZeroMomentError(RuntimeError):
    """A moment inside the ratio window vanishes."""


@dataclass(frozen=True)
class RadiusEstimate:
    """Fitted decay rate r_hat with the band and residual behind it."""

    r_hat: float
    prefactor: float
    band_lo: int
    band_hi: int
    n_modes: int
    residual: float
    s: float


def fit_decay(
    u_hat: np.ndarray,
    s: float = 1.0,
    floor: float | None = None,
) -> RadiusEstimate:
    """Least-squares fit ln|u_k| ~ ln C - r |k|^(1/s) over the usable band.

    ``u_hat`` holds modes -K..K.  The band keeps |k| >= 2 (the low modes only
    carry prefactor information) and |u_k| > floor, where the floor defaults
    to 1e-13 times the spectral peak to cut the round-off plateau.  Fewer
    than 8 surviving modes raise InsufficientBandError.  The residual is the
    RMS misfit of the linear model in log space.
    """
    if s <= 0:
        raise ValueError("Gevrey order s must be positive")
    u_hat = np.asarray(u_hat)
    K = (u_hat.size - 1) // 2
    if u_hat.size != 2 * K + 1:
        raise ValueError("spectrum length must be odd (modes -K..K)")
    mags = np.abs(u_hat)
    peak = float(mags.max())
    if floor is None:
        floor = 1e-13 * peak
    modes = np.arange(-K, K + 1)
    keep = (np.abs(modes) >= 2) & (mags > floor)
    n = int(keep.sum())
    if n < 8:
        raise InsufficientBandError(
            f"only {n} modes above floor {floor:.3g} with |k| >= 2; need at least 8"
        )
    x = np.abs(modes[keep]).astype(float) ** (1.0 / s)
    y = np.log(mags[keep])
    design = np.column_stack([np.ones_like(x), -x])
    (log_c, r), *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ np.array([log_c, r])
    residual = float(np.sqrt(np.mean((y - fitted) ** 2)))
    band = np.abs(modes[keep])
    return RadiusEstimate(
        r_hat=float(r),
        prefactor=float(np.exp(log_c)),
        band_lo=int(band.min()),
        band_hi=int(band.max()),
        n_modes=n,
        residual=residual,
        s=s,
    )


@dataclass(frozen=True)
class MomentRadiusEstimate:
    """Ratio-test radius from factorial moment growth."""

    r_hat: float
    ratios: tuple[float, ...]
    j_lo: int
    j_hi: int
    non_factorial: bool


def fit_moment_radius(
    moments: np.ndarray,
    j_lo: int,
    j_hi: int,
) -> MomentRadiusEstimate:
    """Median of (j+1) M_j / M_{j+1} over j in [j_lo, j_hi].

    For M_j ~ C Lambda^j j! every ratio equals 1/Lambda, the strip half-width.
    The window must contain at least 4 ratios; a vanishing moment inside it
    raises ZeroMomentError.  A ratio spread above 1.5x flags non-factorial
    growth (e.g. a single-mode spectrum, whose ratios grow like j+1).
    """
    moments = np.asarray(moments, dtype=float)
    if not 0 <= j_lo < j_hi:
        raise ValueError("need 0 <= j_lo < j_hi")
    if j_hi + 1 >= moments.size:
        raise ValueError("window needs M_{j_hi+1}: increase len(moments) or shrink j_hi")
    if j_hi - j_lo + 1 < 4:
        raise ValueError("ratio window must contain at least 4 entries")
    window = moments[j_lo : j_hi + 2]
    if (window == 0.0).any():
        raise ZeroMomentError(f"zero moment inside window [{j_lo}, {j_hi + 1}]")
    js = np.arange(j_lo, j_hi + 1, dtype=float)
    ratios = (js + 1.0) * moments[j_lo : j_hi + 1] / moments[j_lo + 1 : j_hi + 2]
    spread = float(ratios.max() / ratios.min()) if ratios.min() > 0 else float("inf")
    return MomentRadiusEstimate(
        r_hat=float(np.median(ratios)),
        ratios=tuple(float(v) for v in ratios),
        j_lo=j_lo,
        j_hi=j_hi,
        non_factorial=bool(spread > 1.5),
    )
