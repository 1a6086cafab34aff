"""Greedy epsilon-nets on finite metric spaces and volume-comparison packing bounds.

A finite metric space stands in for a compact model surface: we sample points,
tabulate exact pairwise geodesic distances, and build nets on the sample.  The
two facts this module operationalizes are

* a farthest-point-first greedy pass returns centers that cover the space at
  radius eps while staying pairwise >= eps apart (so the eps/2-balls around
  the centers are disjoint), and
* disjoint eps/2-balls inside a space of diameter <= D admit the curvature-
  only cardinality bound floor(ball(D) / ball(eps/2)) by relative volume
  comparison, independent of which space realized the sample.

Samplers and closed-form distance matrices for round spheres, their finite
orthogonal quotients, and unit-cube flat tori (with optional point-group
identifications) are provided so the bound can be exercised end to end.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .groups import OrthogonalAction
from .modelspectra import ModelOrbifold, catalog_model
from .spaceform import SpaceForm, ball_volume

__all__ = [
    "FiniteMetricSpace",
    "greedy_minimal_net",
    "packing_bound",
    "verify_net",
    "uniform_sphere_points",
    "uniform_torus_points",
    "sphere_distance_matrix",
    "torus_distance_matrix",
    "model_point_cloud",
]

METRIC_TOL = 1e-9


class FiniteMetricSpace:
    """A list of point ids plus a validated, immutable distance matrix.

    Validation (all at tolerance ``METRIC_TOL``): square shape, nonnegative
    entries, zero diagonal, symmetry, and the triangle inequality, checked
    exhaustively via a running min-plus pass over intermediate points.
    """

    def __init__(self, points, dist) -> None:
        ids = list(points)
        if not ids:
            raise DomainError("metric space needs at least one point")
        if len(set(ids)) != len(ids):
            raise DomainError("point ids must be distinct")
        d = np.asarray(dist, dtype=float)
        n = len(ids)
        if d.shape != (n, n):
            raise DomainError(f"distance matrix shape {d.shape} != ({n}, {n})")
        if not np.all(np.isfinite(d)):
            raise DomainError("distance matrix has non-finite entries")
        if d.min() < -METRIC_TOL:
            raise DomainError("negative distance")
        if np.abs(np.diag(d)).max() > METRIC_TOL:
            raise DomainError("nonzero diagonal")
        if np.abs(d - d.T).max() > METRIC_TOL:
            raise DomainError("asymmetric distance matrix")
        shortcut = d.copy()
        for k in range(n):
            np.minimum(shortcut, d[:, k, None] + d[None, k, :], out=shortcut)
        gap = (d - shortcut).max()
        if gap > METRIC_TOL:
            raise DomainError(f"triangle inequality violated by {gap:.3e}")
        d = d.copy()
        d.flags.writeable = False
        self._points = ids
        self._dist = d
        self._index = {pid: i for i, pid in enumerate(ids)}

    @property
    def points(self) -> list:
        return list(self._points)

    @property
    def dist(self) -> np.ndarray:
        return self._dist

    def __len__(self) -> int:
        return len(self._points)

    def index_of(self, point_id) -> int:
        try:
            return self._index[point_id]
        except KeyError:
            raise DomainError(f"unknown point id {point_id!r}") from None

    def to_dict(self) -> dict:
        return {"points": len(self._points), "dist": self._dist.tolist()}

    @classmethod
    def from_dict(cls, payload: dict) -> "FiniteMetricSpace":
        try:
            count = int(payload["points"])
            dist = payload["dist"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed point-cloud payload: {exc}") from exc
        return cls([f"p{i}" for i in range(count)], dist)


def greedy_minimal_net(space: FiniteMetricSpace, eps: float) -> list:
    """Farthest-point-first net: covers at radius eps, centers >= eps apart.

    Deterministic given the input order: the first point seeds the net and
    ties in the farthest-point selection resolve to the lowest index.  A point
    is covered once some center lies at distance strictly below eps, so a
    point exactly eps away still gets promoted to a center.
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    d = space.dist
    ids = space.points
    centers = [0]
    reach = d[0].copy()
    while True:
        far = int(np.argmax(reach))
        if reach[far] < eps:
            break
        centers.append(far)
        np.minimum(reach, d[far], out=reach)
    return [ids[i] for i in centers]


def packing_bound(n: int, kappa: float, diameter: float, eps: float) -> int:
    """How many disjoint eps/2-balls fit in a ball of radius ``diameter``.

    Relative volume comparison in the curvature-kappa model: any eps-separated
    set in a space of diameter <= ``diameter`` has at most
    floor(ball(diameter) / ball(eps/2)) points.
    """
    if not 0.0 < eps <= 2.0 * diameter:
        raise DomainError(f"need 0 < eps <= 2*diameter, got eps={eps} diameter={diameter}")
    sf = SpaceForm(int(n), float(kappa))
    ratio = ball_volume(sf, float(diameter)) / ball_volume(sf, eps / 2.0)
    return int(np.floor(ratio + 1e-9))


def verify_net(space: FiniteMetricSpace, eps: float, net) -> tuple[bool, list]:
    """Exhaustively check the two net properties; list every violation.

    Returns ``(ok, violations)`` where each violation is either
    ``{"kind": "uncovered", "point": id, "distance": float}`` (the nearest
    center sits at distance >= eps) or
    ``{"kind": "separation", "pair": [id, id], "distance": float}`` (two
    centers closer than eps).
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    idx = [space.index_of(pid) for pid in net]
    if not idx:
        raise DomainError("net is empty")
    d = space.dist
    ids = space.points
    violations: list = []
    nearest = d[idx].min(axis=0)
    for j in np.flatnonzero(nearest >= eps):
        violations.append({"kind": "uncovered", "point": ids[j], "distance": float(nearest[j])})
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            gap = d[idx[a], idx[b]]
            if gap < eps:
                violations.append(
                    {"kind": "separation", "pair": [ids[idx[a]], ids[idx[b]]], "distance": float(gap)}
                )
    return (not violations, violations)


# ---------------------------------------------------------------------------
# Samplers and closed-form distance matrices for the catalog surfaces.


def uniform_sphere_points(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the unit ``dim``-sphere in R^(dim+1), as rows."""
    if dim < 1 or count < 1:
        raise DomainError("need dim >= 1 and count >= 1")
    pts = rng.standard_normal((count, dim + 1))
    norms = np.linalg.norm(pts, axis=1)
    while np.any(norms < 1e-12):  # pragma: no cover - astronomically unlikely
        bad = norms < 1e-12
        pts[bad] = rng.standard_normal((int(bad.sum()), dim + 1))
        norms = np.linalg.norm(pts, axis=1)
    return pts / norms[:, None]


def uniform_torus_points(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points in the unit cube, read as coordinates on R^dim / Z^dim."""
    if dim < 1 or count < 1:
        raise DomainError("need dim >= 1 and count >= 1")
    return rng.random((count, dim))


def sphere_distance_matrix(points: np.ndarray, action: OrthogonalAction | None = None) -> np.ndarray:
    """Great-circle distances, minimized over an optional deck action.

    For a quotient S^d / G the distance between orbits is
    min_g arccos(<p, g q>); passing ``action=None`` gives the round sphere.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise DomainError("points must be a 2-D array of row vectors")
    norms = np.linalg.norm(pts, axis=1)
    if np.abs(norms - 1.0).max() > 1e-9:
        raise DomainError("sphere points must be unit vectors")
    elements = [np.eye(pts.shape[1])] if action is None else action.elements()
    best = -np.ones((len(pts), len(pts)))
    for g in elements:
        np.maximum(best, pts @ (pts @ g.T).T, out=best)
    dist = np.arccos(np.clip(best, -1.0, 1.0))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def torus_distance_matrix(points: np.ndarray, action: OrthogonalAction | None = None) -> np.ndarray:
    """Flat distances on R^dim / Z^dim, minimized over an optional point group.

    Each coordinate difference wraps to min(|t|, 1 - |t|); an optional
    orthogonal action (which must map the unit lattice to itself, e.g. the
    half-turn x -> -x or a quarter-turn block rotation) is minimized over to
    give quotient distances.
    """
    pts = np.asarray(points, dtype=float) % 1.0
    if pts.ndim != 2:
        raise DomainError("points must be a 2-D array of row vectors")
    elements = [np.eye(pts.shape[1])] if action is None else action.elements()
    best = np.full((len(pts), len(pts)), np.inf)
    for g in elements:
        lattice = g.round()
        if np.abs(g - lattice).max() > 1e-9:
            raise DomainError("point-group element does not preserve the unit lattice")
        moved = (pts @ g.T) % 1.0
        delta = np.abs(pts[:, None, :] - moved[None, :, :])
        wrapped = np.minimum(delta, 1.0 - delta)
        np.minimum(best, np.sqrt((wrapped**2).sum(axis=2)), out=best)
    dist = 0.5 * (best + best.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def _cloud_ids(count: int) -> list:
    return [f"p{i}" for i in range(count)]


def model_point_cloud(model: ModelOrbifold | str, count: int, seed: int) -> FiniteMetricSpace:
    """Sample ``count`` points from a catalog surface with exact distances.

    Spheres and their orthogonal quotients use great-circle distances
    minimized over the deck action; flat models require the unit-cube lattice
    basis and use wrapped coordinate distances minimized over the point group.
    """
    if isinstance(model, str):
        model = catalog_model(model)
    if count < 1:
        raise DomainError("need count >= 1")
    rng = np.random.default_rng(seed)
    if model.kind in ("round_sphere", "sphere_quotient"):
        pts = uniform_sphere_points(model.dimension, count, rng)
        dist = sphere_distance_matrix(pts, model.action)
    elif model.kind in ("flat_torus", "torus_quotient"):
        basis = np.asarray(model.lattice_basis, dtype=float)
        if np.abs(basis - np.eye(model.dimension)).max() > 1e-12:
            raise DomainError("point clouds are only supported for unit-cube lattice bases")
        pts = uniform_torus_points(model.dimension, count, rng)
        dist = torus_distance_matrix(pts, model.action)
    else:  # pragma: no cover - catalog kinds are closed
        raise DomainError(f"unsupported model kind {model.kind!r}")
    return FiniteMetricSpace(_cloud_ids(count), dist)
