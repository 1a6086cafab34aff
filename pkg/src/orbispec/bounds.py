"""Spectral-to-geometric bound pipelines.

From a truncated Laplace spectrum and a curvature lower bound kappa this
module certifies, in order: an upper bound on the diameter (disjoint balls
of radius r at distance 2r along a segment force small Dirichlet
eigenvalues into the spectrum, so the eigenvalue count below the r-ball
threshold caps the number of balls); an upper bound on every isotropy
order (volume comparison of the orbifold against the curvature-model ball
of diameter size); and an upper bound on the number of isolated singular
points (singular points repel each other by a certified separation radius,
so a packing argument counts them).  All constants are certified
conservatively — strict inequalities with explicit margins — so the
soundness argument survives floating point.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dirichlet import lowest_dirichlet_eigenvalue
from .errors import CertificationError, ConvergenceError, DomainError
from .modelspectra import Spectrum, counting_function
from .spaceform import (
    SpaceForm,
    ball_volume,
    bonnet_myers_cap,
    cone_volume,
    law_of_cosines_side,
    two_cap_complement_measure,
    unit_ball_volume,
)
from .weyl import estimate_dimension, estimate_volume

# Eigenvalues within this (scaled) distance of the ball threshold are
# counted: a larger rho weakens the bound but never breaks soundness.
RHO_TOL_SCALE = 1e-9
ALPHA_MARGIN = 1e-9
TRIANGLE_MARGIN = 1e-12
SHRINK = 1.0 - 1e-6
BISECT_ITERS = 60
DEFAULT_GRID_POINTS = 64
# Positive-curvature radius grids stop just short of the antipodal cap.
CAP_GRID_FRACTION = 0.999


def lambda_threshold(n: int, kappa: float, r: float) -> float:
    """Lowest Dirichlet eigenvalue of the r-ball in the curvature model."""
    return lowest_dirichlet_eigenvalue(SpaceForm(n, kappa), r)


def spectrum_content_id(spec: Spectrum) -> str:
    """Content-addressed id: identical spectra give identical reports."""
    payload = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def diameter_bound(spec: Spectrum, kappa: float, n: int, r: float) -> tuple[float, int]:
    """(D, rho): diameter bound from the eigenvalue count below the r-ball threshold.

    rho counts eigenvalues (with multiplicity) up to the threshold plus an
    absolute tolerance 1e-9 * max(1, threshold); D = 2 r (rho + 1), clamped
    to the Bonnet-Myers cap when kappa > 0.
    """
    if not (isinstance(n, int) and n >= 2):
        raise DomainError(f"dimension must be an integer >= 2, got {n!r}")
    if not (math.isfinite(r) and r > 0):
        raise DomainError(f"ball radius must be positive and finite, got {r!r}")
    if kappa > 0 and r >= bonnet_myers_cap(kappa):
        raise DomainError(
            f"ball radius {r:.9g} must be below the antipodal cap "
            f"{bonnet_myers_cap(kappa):.9g} for kappa = {kappa:.9g}"
        )
    lam_thr = lambda_threshold(n, kappa, r)
    tol = RHO_TOL_SCALE * max(1.0, lam_thr)
    if spec.truncation < lam_thr + tol:
        raise DomainError(
            f"spectrum truncation {spec.truncation:.9g} is below the ball threshold "
            f"{lam_thr:.9g}; the eigenvalue count there cannot be certified"
        )
    rho = counting_function(spec, lam_thr + tol)
    d = 2.0 * r * (rho + 1)
    if kappa > 0:
        d = min(d, bonnet_myers_cap(kappa))
    return d, rho


def default_r_grid(
    n: int, kappa: float, volume: float, points: int = DEFAULT_GRID_POINTS
) -> np.ndarray:
    """Logarithmic radius grid spanning three decades below a diameter-scale hint."""
    if not volume > 0:
        raise DomainError(f"volume must be positive, got {volume!r}")
    if points < 2:
        raise DomainError(f"grid needs at least 2 points, got {points!r}")
    d_hint = 2.0 * (volume / unit_ball_volume(n)) ** (1.0 / n)
    hi = d_hint
    if kappa > 0:
        hi = min(hi, CAP_GRID_FRACTION * bonnet_myers_cap(kappa))
    lo = min(d_hint, hi) / 1000.0
    return np.geomspace(lo, hi, points)


def best_diameter_bound(
    spec: Spectrum,
    kappa: float,
    n: int,
    r_grid=None,
    volume_hint: float | None = None,
) -> tuple[float, float]:
    """(D*, r*): smallest diameter bound over a radius grid; ties favor small r.

    Grid points whose ball threshold exceeds the spectrum truncation (or
    that fall outside the curvature domain) are skipped.  Without an
    explicit grid a default is built from volume_hint.
    """
    if r_grid is None:
        if volume_hint is None:
            raise DomainError("need either an explicit r_grid or a volume_hint")
        r_grid = default_r_grid(n, kappa, volume_hint)
    radii = np.sort(np.asarray(r_grid, dtype=float))
    if radii.size == 0:
        raise DomainError("the radius grid is empty")
    best: tuple[float, float] | None = None
    last_reason = "empty grid"
    for r in radii:
        try:
            d, _ = diameter_bound(spec, kappa, n, float(r))
        except DomainError as exc:
            last_reason = str(exc)
            continue
        if best is None or d < best[0]:
            best = (d, float(r))
    if best is None:
        raise CertificationError(
            "diameter", f"no admissible radius in the grid; last failure: {last_reason}"
        )
    return best


def isotropy_order_cap(spec: Spectrum, kappa: float, fit, d: float) -> int:
    """Upper bound on every isotropy order: floor of ball_volume(D) / volume.

    fit is either a WeylFit or an explicit (n, volume) pair.  The dilation
    of small balls around a singular point scales volume down by the
    isotropy order, so the order cannot exceed the model-ball/volume ratio.
    """
    if hasattr(fit, "dimension_estimate"):
        n, v = fit.dimension_estimate, fit.volume_estimate
    else:
        n, v = fit
    if not (isinstance(n, int) and n >= 1):
        raise DomainError(f"dimension must be an integer >= 1, got {n!r}")
    if spec.dimension is not None and spec.dimension != n:
        raise DomainError(
            f"spectrum declares dimension {spec.dimension} but the fit says {n}"
        )
    if not v > 0:
        raise DomainError(f"volume must be positive, got {v!r}")
    if not d > 0:
        raise DomainError(f"diameter bound must be positive, got {d!r}")
    sf = SpaceForm(n, kappa)
    if kappa > 0:
        d = min(d, bonnet_myers_cap(kappa))
    ratio = ball_volume(sf, d) / v
    # Nudge against float drop-off so an exact integer ratio floors to itself.
    return max(1, math.floor(ratio + 1e-9))


def isotropy_type_enumeration(n: int, cap: int) -> list[str]:
    """Possible isotropy groups under an order cap.

    Orientable 2-orbifold isotropy sits in SO(2), so the groups are the
    cyclic C_k with k up to the cap; in higher dimension only the order
    cap itself is reported.
    """
    if not (isinstance(cap, int) and cap >= 1):
        raise DomainError(f"order cap must be an integer >= 1, got {cap!r}")
    if n == 2:
        return [f"C_{k}" for k in range(2, cap + 1)]
    return [
        f"orders 2..{cap} admissible; explicit group enumeration is provided "
        "only for n = 2, where orientable isotropy is cyclic"
    ]


def _linked_complement_measure(n: int, alpha: float) -> float:
    """Directions on S^(n-1) at angle >= pi/2 - alpha from both hinge sides."""
    return two_cap_complement_measure(n - 1, alpha, 0.5 * math.pi - alpha)


def alpha_constant(n: int, kappa: float, d: float, v: float) -> float:
    """Largest certified angle whose bad-direction cone stays under v/6.

    The complement measure grows with alpha (at alpha -> 0 the two caps of
    angular radius pi/2 - alpha cover the sphere; at alpha -> pi/2 they
    shrink to points), so bisection runs against an increasing cone volume
    and the returned endpoint satisfies the strict inequality with margin
    1e-9.
    """
    sf = SpaceForm(n, kappa)
    if kappa > 0:
        d = min(d, bonnet_myers_cap(kappa))
    if not d > 0:
        raise DomainError(f"diameter bound must be positive, got {d!r}")
    if not v > 0:
        raise DomainError(f"volume must be positive, got {v!r}")
    target = v / 6.0 - ALPHA_MARGIN
    if target <= 0.0:
        raise CertificationError(
            "alpha", f"volume {v!r} is too small to certify any angle at margin {ALPHA_MARGIN}"
        )

    def cone(alpha: float) -> float:
        return cone_volume(sf, d, _linked_complement_measure(n, alpha))

    hi = 0.5 * math.pi * (1.0 - 1e-12)
    if cone(hi) < target:
        return hi
    lo = 1e-9
    if not cone(lo) < target:
        raise CertificationError(
            "alpha", f"no admissible angle: even alpha = {lo} exceeds the v/6 budget"
        )
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if cone(mid) < target:
            lo = mid
        else:
            hi = mid
    return lo


def ell_constant(n: int, kappa: float, v: float) -> float:
    """(1 - 1e-6) times the radius whose model-ball volume equals v/3."""
    sf = SpaceForm(n, kappa)
    if not v > 0:
        raise DomainError(f"volume must be positive, got {v!r}")
    target = v / 3.0
    if kappa > 0:
        cap = bonnet_myers_cap(kappa)
        if ball_volume(sf, cap) <= target:
            return SHRINK * cap
        hi = cap * (1.0 - 1e-12)
    else:
        hi = 1.0
        for _ in range(200):
            if ball_volume(sf, hi) > target:
                break
            hi *= 2.0
        else:
            raise ConvergenceError("could not bracket the v/3 ball radius from above")
    lo = hi / 2.0
    while ball_volume(sf, lo) >= target:
        lo /= 2.0
        if lo < 1e-300:
            raise ConvergenceError("could not bracket the v/3 ball radius from below")
    r0 = brentq(lambda r: ball_volume(sf, r) - target, lo, hi, xtol=1e-15, rtol=1e-15)
    return SHRINK * r0


def r_constant(
    n: int,
    kappa: float,
    alpha: float,
    ell: float,
    l_max: float,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> float:
    """Largest certified hinge side below ell that always shortens the triangle.

    Certifies that every hinge with one side at most r, the other in
    [ell, l_max] and enclosed angle at most pi/2 - alpha closes with a side
    strictly shorter than the long one.  The closing side grows with the
    short side in every curvature, so the grid checks the worst case at r,
    sweeping the long side and the angle; bisection with a final shrink of
    1e-6 keeps the certificate strict.
    """
    if not (0.0 < alpha < 0.5 * math.pi):
        raise DomainError(f"angle must lie in (0, pi/2), got {alpha!r}")
    if not ell > 0:
        raise DomainError(f"ell must be positive, got {ell!r}")
    if kappa > 0:
        cap = bonnet_myers_cap(kappa)
        if ell >= cap:
            raise DomainError(f"ell = {ell!r} must stay below the antipodal cap {cap!r}")
        l_max = min(l_max, cap * (1.0 - 1e-12))
    if l_max < ell:
        raise DomainError(f"l_max = {l_max!r} must be at least ell = {ell!r}")
    if grid_points < 2:
        raise DomainError(f"grid needs at least 2 points, got {grid_points!r}")

    c3, theta = np.meshgrid(
        np.linspace(ell, l_max, grid_points),
        np.linspace(0.0, 0.5 * math.pi - alpha, grid_points),
    )
    margin = TRIANGLE_MARGIN * np.maximum(1.0, c3)

    def admissible(r: float) -> bool:
        c1 = law_of_cosines_side(kappa, r, c3, theta)
        return bool(np.all(c1 < c3 - margin))

    if admissible(ell * (1.0 - 1e-12)):
        return ell * SHRINK
    lo = ell / 2.0
    while lo > ell * 1e-9 and not admissible(lo):
        lo /= 2.0
    if not admissible(lo):
        raise CertificationError(
            "r-constant", "no positive separation radius could be certified on the grid"
        )
    hi = ell * (1.0 - 1e-12)
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    return lo * SHRINK


def singular_point_cap(
    n: int, kappa: float, d: float, v: float, grid_points: int = DEFAULT_GRID_POINTS
) -> tuple[int, dict[str, float]]:
    """(C, constants): packing cap on isolated singular points.

    Singular points are pairwise at least r apart (the separation radius
    certified by r_constant with the alpha/ell constants), so disjoint
    r/4-balls around them pack the diameter-D ball: C is the volume ratio.
    """
    sf = SpaceForm(n, kappa)
    if kappa > 0:
        d = min(d, bonnet_myers_cap(kappa))
    alpha = alpha_constant(n, kappa, d, v)
    ell = ell_constant(n, kappa, v)
    r = r_constant(n, kappa, alpha, ell, max(d, ell), grid_points)
    # With consistent inputs r < ell < D; the clamp only guards degenerate
    # volume/diameter combinations and stays sound (smaller r still separates).
    r_used = min(r, d)
    cap = math.floor(ball_volume(sf, d) / ball_volume(sf, r_used / 4.0) + 1e-9)
    return cap, {"alpha": alpha, "ell": ell, "r": r_used}


@dataclass(frozen=True)
class BoundReport:
    """Everything a bound pipeline certified, with provenance."""

    spectrum_id: str
    kappa: float
    n: int
    volume: float
    source: str  # "given" | "weyl-estimated"
    diameter_bound: float
    r_used: float
    rho: int
    isotropy_cap: int
    alpha: float | None
    ell: float | None
    r_sep: float | None
    singular_cap: int | None
    notes: dict[str, str]
    stage_trace: tuple[dict, ...]

    def __post_init__(self):
        if not self.diameter_bound > 0:
            raise DomainError("diameter bound must be positive")
        if self.kappa > 0 and self.diameter_bound > bonnet_myers_cap(self.kappa) * (1 + 1e-12):
            raise DomainError("diameter bound exceeds the Bonnet-Myers cap")
        if self.rho < 1 or self.isotropy_cap < 1:
            raise DomainError("rho and the isotropy cap must be at least 1")
        if self.singular_cap is not None:
            if self.singular_cap < 0:
                raise DomainError("singular point cap must be nonnegative")
            if not (self.r_sep is not None and self.ell is not None and self.alpha is not None):
                raise DomainError("singular cap requires the alpha/ell/r constants")
            if not (0.0 < self.r_sep < self.ell):
                raise DomainError("separation radius must lie in (0, ell)")

    def to_dict(self) -> dict:
        return {
            "inputs": {
                "spectrum_id": self.spectrum_id,
                "kappa": self.kappa,
                "n": self.n,
                "volume": self.volume,
                "source": self.source,
            },
            "diameter_bound": self.diameter_bound,
            "r_used": self.r_used,
            "rho": self.rho,
            "isotropy_cap": self.isotropy_cap,
            "alpha": self.alpha,
            "ell": self.ell,
            "r_sep": self.r_sep,
            "singular_cap": self.singular_cap,
            "notes": dict(self.notes),
            "stage_trace": [dict(s) for s in self.stage_trace],
        }


def _run_stage(trace: list, stage: str, inputs: dict, fn):
    try:
        out = fn()
    except CertificationError:
        raise
    except (DomainError, ConvergenceError) as exc:
        raise CertificationError(stage, str(exc)) from exc
    trace.append({"stage": stage, "inputs": inputs, "outputs": out[1]})
    return out[0]


def _resolve_dimension_volume(spec: Spectrum, n, v, trace: list):
    source = "given" if (n is not None and v is not None) else "weyl-estimated"
    if n is None:
        n = _run_stage(
            trace,
            "weyl-dimension",
            {"eigenvalue_count": spec.total_count},
            lambda: (lambda nd: (nd[0], {"n": nd[0], "slope_snap_distance": nd[1]}))(
                estimate_dimension(spec)
            ),
        )
    if spec.dimension is not None and spec.dimension != n:
        raise CertificationError(
            "weyl-dimension",
            f"spectrum declares dimension {spec.dimension} but the pipeline uses {n}",
        )
    if v is None:
        v = _run_stage(
            trace,
            "weyl-volume",
            {"n": n},
            lambda: (lambda vol: (vol, {"volume": vol}))(estimate_volume(spec, n)),
        )
    if not v > 0:
        raise CertificationError("weyl-volume", f"volume {v!r} is not positive")
    return int(n), float(v), source


def spectral_isotropy_bound(
    spec: Spectrum,
    kappa: float,
    n: int | None = None,
    v: float | None = None,
    r_grid=None,
) -> BoundReport:
    """Diameter bound plus isotropy-order cap from a spectrum and curvature."""
    trace: list[dict] = []
    n, v, source = _resolve_dimension_volume(spec, n, v, trace)
    d, r_used = _run_stage(
        trace,
        "diameter",
        {"kappa": kappa, "n": n},
        lambda: (lambda dr: (dr, {"diameter_bound": dr[0], "r": dr[1]}))(
            best_diameter_bound(spec, kappa, n, r_grid=r_grid, volume_hint=v)
        ),
    )
    rho = diameter_bound(spec, kappa, n, r_used)[1]
    cap = _run_stage(
        trace,
        "isotropy-cap",
        {"diameter_bound": d, "volume": v},
        lambda: (lambda c: (c, {"isotropy_cap": c}))(
            isotropy_order_cap(spec, kappa, (n, v), d)
        ),
    )
    notes = {
        "diameter": "smallest 2r(rho+1) over the radius grid"
        + (", clamped at the Bonnet-Myers cap" if kappa > 0 else ""),
        "rho": f"eigenvalues counted up to the ball threshold + {RHO_TOL_SCALE} * max(1, threshold)",
        "isotropy_cap": "floor(ball_volume(D) / volume)",
        "volume": source,
    }
    return BoundReport(
        spectrum_id=spectrum_content_id(spec),
        kappa=float(kappa),
        n=n,
        volume=v,
        source=source,
        diameter_bound=d,
        r_used=r_used,
        rho=rho,
        isotropy_cap=cap,
        alpha=None,
        ell=None,
        r_sep=None,
        singular_cap=None,
        notes=notes,
        stage_trace=tuple(trace),
    )


def spectral_singular_point_bound(
    spec: Spectrum,
    kappa: float,
    n: int | None = None,
    v: float | None = None,
    r_grid=None,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> BoundReport:
    """Full pipeline: Weyl data, diameter bound, isotropy cap, singular-point cap.

    Every stage failure is reported as a certification error naming the
    stage; the returned report carries the stage trace and per-constant
    provenance notes.
    """
    base = spectral_isotropy_bound(spec, kappa, n=n, v=v, r_grid=r_grid)
    trace = list(base.stage_trace)
    cap, constants = _run_stage(
        trace,
        "singular-cap",
        {"diameter_bound": base.diameter_bound, "volume": base.volume},
        lambda: (lambda cc: (cc, {"singular_cap": cc[0], **cc[1]}))(
            singular_point_cap(base.n, kappa, base.diameter_bound, base.volume, grid_points)
        ),
    )
    notes = dict(base.notes)
    notes.update(
        {
            "alpha": f"largest angle with cone volume < v/6, strict margin {ALPHA_MARGIN}",
            "ell": "(1 - 1e-6) times the exact v/3 ball radius",
            "r_sep": f"hinge certification on a {grid_points}x{grid_points} grid, shrink 1e-6",
            "singular_cap": "floor(ball_volume(D) / ball_volume(r/4))",
        }
    )
    return BoundReport(
        spectrum_id=base.spectrum_id,
        kappa=base.kappa,
        n=base.n,
        volume=base.volume,
        source=base.source,
        diameter_bound=base.diameter_bound,
        r_used=base.r_used,
        rho=base.rho,
        isotropy_cap=base.isotropy_cap,
        alpha=constants["alpha"],
        ell=constants["ell"],
        r_sep=constants["r"],
        singular_cap=cap,
        notes=notes,
        stage_trace=tuple(trace),
    )
