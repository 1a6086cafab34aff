"""Dimension and volume estimates from a truncated spectrum.

The counting function of a closed n-orbifold grows like
N(lam) ~ vol(B) * vol(O) * lam^(n/2) / (2 pi)^n, so the log-log slope of N
over a tail window recovers n/2, and the prefactor recovers the volume.
The slope is snapped to a half-integer grid (dimension must be an integer)
and the snap distance is surfaced as a diagnostic; the volume uses a
median over the window because lattice-type spectra oscillate around the
asymptote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CertificationError, DomainError
from .modelspectra import Spectrum
from .spaceform import unit_ball_volume

MIN_EIGENVALUE_COUNT = 100
WINDOW_FRACTION = 0.25
SLOPE_SNAP_THRESHOLD = 0.25


@dataclass(frozen=True)
class WeylFit:
    dimension_estimate: int
    volume_estimate: float
    window: tuple[float, float]
    residual: float

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension_estimate,
            "volume": self.volume_estimate,
            "window": [self.window[0], self.window[1]],
            "residual": self.residual,
        }


def _window_samples(spec: Spectrum, window_fraction: float):
    """Distinct positive eigenvalues in the tail window and N there."""
    if not (0.0 < window_fraction < 1.0):
        raise DomainError(f"window fraction must lie in (0, 1), got {window_fraction!r}")
    vals = spec.values
    counts = np.cumsum(spec.multiplicities)
    lam_hi = float(vals[-1]) if len(vals) else 0.0
    if lam_hi <= 0.0:
        raise DomainError("spectrum has no positive eigenvalues to fit")
    lam_lo = window_fraction * lam_hi
    mask = (vals >= lam_lo) & (vals > 0.0)
    if not np.any(mask):
        raise DomainError("the fit window contains no eigenvalues")
    return vals[mask], counts[mask].astype(float), (lam_lo, lam_hi)


def estimate_dimension(
    spec: Spectrum, window_fraction: float = WINDOW_FRACTION
) -> tuple[int, float]:
    """(dimension, diagnostic): snapped log-log slope of the counting function.

    The diagnostic is |2s - round(2s)| for the fitted slope s; values
    beyond 0.25 mean the input is not in the asymptotic regime (or is not
    a Laplace spectrum) and are rejected.
    """
    if spec.total_count < MIN_EIGENVALUE_COUNT:
        raise DomainError(
            f"need at least {MIN_EIGENVALUE_COUNT} eigenvalues counted with "
            f"multiplicity, got {spec.total_count}"
        )
    lam, counts, _ = _window_samples(spec, window_fraction)
    if len(lam) < 2:
        raise DomainError("the fit window has fewer than 2 distinct eigenvalues")
    slope = float(np.polyfit(np.log(lam), np.log(counts), 1)[0])
    n = round(2.0 * slope)
    diagnostic = abs(2.0 * slope - n)
    if diagnostic > SLOPE_SNAP_THRESHOLD or n < 1:
        raise CertificationError(
            "weyl-dimension",
            f"log-log slope {slope:.6g} gives 2s = {2 * slope:.6g}, "
            f"{diagnostic:.3g} away from an integer (threshold {SLOPE_SNAP_THRESHOLD})",
        )
    return int(n), diagnostic


def estimate_volume(
    spec: Spectrum, n: int, window_fraction: float = WINDOW_FRACTION
) -> float:
    """Median of N(lam) (2 pi)^n / (vol B^n_0(1) lam^(n/2)) over the window."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {n!r}")
    lam, counts, _ = _window_samples(spec, window_fraction)
    prefactor = (2.0 * math.pi) ** n / unit_ball_volume(n)
    return float(np.median(counts * prefactor / lam ** (0.5 * n)))


def weyl_fit(spec: Spectrum, window_fraction: float = WINDOW_FRACTION) -> WeylFit:
    n, diagnostic = estimate_dimension(spec, window_fraction)
    volume = estimate_volume(spec, n, window_fraction)
    _, _, window = _window_samples(spec, window_fraction)
    if not volume > 0:
        raise CertificationError("weyl-volume", f"volume estimate {volume!r} is not positive")
    return WeylFit(n, volume, window, diagnostic)
