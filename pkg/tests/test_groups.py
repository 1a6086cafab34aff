"""Finite orthogonal actions, orbits, and hemisphere certificates."""

from __future__ import annotations

import math

import numpy as np
import pytest

from orbispec.errors import CertificationError, DomainError
from orbispec.groups import (
    OrthogonalAction,
    action_from_dict,
    antipodal_action,
    cyclic_generator,
    in_open_hemisphere,
    orbit,
    orbit_sum,
    sphere_rotation_action,
)


def _random_unit(rng, dim):
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def test_sphere_rotation_action_basics():
    act = sphere_rotation_action(5)
    assert act.ambient_dim == 3
    assert act.order == 5
    els = act.elements()
    assert len(els) == 5
    pole = np.array([0.0, 0.0, 1.0])
    for g in els:
        assert np.allclose(g @ pole, pole, atol=1e-12)
        assert np.abs(g @ g.T - np.eye(3)).max() < 1e-12
    with pytest.raises(DomainError):
        sphere_rotation_action(1)


def test_antipodal_action():
    act = antipodal_action(3)
    assert act.order == 2
    assert np.array_equal(act.generators[0], -np.eye(3))


def test_cyclic_generator_block_structure():
    act = cyclic_generator(4, [1])
    assert act.ambient_dim == 4
    assert act.order == 4
    g = act.generators[0]
    # both blocks rotate by 2 pi / 4
    c, s = math.cos(math.pi / 2), math.sin(math.pi / 2)
    want = np.zeros((4, 4))
    want[0, 0], want[0, 1], want[1, 0], want[1, 1] = c, -s, s, c
    want[2, 2], want[2, 3], want[3, 2], want[3, 3] = c, -s, s, c
    assert np.abs(g - want).max() < 1e-12
    # exponents sharing a factor with the order do not give a free action
    with pytest.raises(DomainError):
        cyclic_generator(4, [2])


def test_declared_order_mismatch_is_caught():
    rot3 = sphere_rotation_action(3).generators[0]
    with pytest.raises(CertificationError) as info:
        OrthogonalAction([rot3], order=4).elements()
    assert info.value.stage == "group-closure"


def test_non_orthogonal_generator_rejected():
    with pytest.raises(DomainError):
        OrthogonalAction([np.array([[1.0, 0.1], [0.0, 1.0]])])


def test_closure_stays_orthogonal_for_large_order():
    act = cyclic_generator(512, [])
    els = act.elements()
    assert len(els) == 512
    worst = max(np.abs(g @ g.T - np.eye(2)).max() for g in els)
    assert worst < 1e-10, worst


def test_action_from_dict_round_trip():
    act = cyclic_generator(6, [1])
    back = action_from_dict({"type": "cyclic", "order": 6, "exponents": [1]})
    assert back.ambient_dim == act.ambient_dim
    assert back.order == 6
    assert np.abs(back.generators[0] - act.generators[0]).max() < 1e-15
    mat = action_from_dict({"type": "matrix", "generators": [g.tolist() for g in act.generators]})
    assert mat.order == 6
    with pytest.raises(DomainError):
        action_from_dict({"order": 6})
    with pytest.raises(DomainError):
        action_from_dict({"type": "permutation"})


def test_orbit_size_divides_order():
    rng = np.random.default_rng(5)
    for _ in range(20):
        l = int(rng.integers(2, 13))
        act = cyclic_generator(l, [])
        v = _random_unit(rng, act.ambient_dim)
        pts = orbit(act, v)
        assert len(pts) in {d for d in range(1, l + 1) if l % d == 0}
        assert np.abs(np.linalg.norm(pts, axis=1) - 1.0).max() < 1e-10
    with pytest.raises(DomainError):
        orbit(cyclic_generator(3, []), np.array([0.5, 0.0]))


def test_orbit_sum_vanishes_for_free_cyclic_actions():
    rng = np.random.default_rng(11)
    for _ in range(60):
        l = int(rng.integers(2, 51))
        n_blocks = int(rng.integers(0, 4))
        exps = []
        for _ in range(n_blocks):
            e = int(rng.integers(1, l))
            while math.gcd(e, l) != 1:
                e = int(rng.integers(1, l))
            exps.append(e)
        act = cyclic_generator(l, exps)
        v = _random_unit(rng, act.ambient_dim)
        s = orbit_sum(act, v)
        assert np.linalg.norm(s) <= 1e-10 * l, (l, exps, np.linalg.norm(s))


def test_orbit_not_in_open_hemisphere():
    rng = np.random.default_rng(23)
    for _ in range(25):
        l = int(rng.integers(2, 31))
        act = cyclic_generator(l, [])
        pts = orbit(act, _random_unit(rng, act.ambient_dim))
        assert in_open_hemisphere(pts) is None, (l, pts)


def test_antipodal_pair_not_in_open_hemisphere():
    rng = np.random.default_rng(29)
    for dim in range(2, 9):
        v = _random_unit(rng, dim)
        assert in_open_hemisphere(np.array([v, -v])) is None


def test_hemisphere_witness_verified_by_inner_products():
    rng = np.random.default_rng(31)
    for _ in range(40):
        dim = int(rng.integers(2, 9))
        count = int(rng.integers(1, 12))
        w = _random_unit(rng, dim)
        pts = []
        while len(pts) < count:
            p = _random_unit(rng, dim)
            if p @ w > 0.05:
                pts.append(p)
        witness = in_open_hemisphere(np.array(pts))
        assert witness is not None
        assert abs(np.linalg.norm(witness) - 1.0) < 1e-9
        assert (np.array(pts) @ witness).min() > 0.0


def test_hemisphere_rejects_malformed_points():
    with pytest.raises(DomainError):
        in_open_hemisphere(np.zeros((0, 3)))
    # non-unit points are fine; the certificate is scale-covariant
    w = in_open_hemisphere(np.array([[2.0, 0.0], [0.5, 0.1]]))
    assert w is not None and (np.array([[2.0, 0.0], [0.5, 0.1]]) @ w).min() > 0.0
