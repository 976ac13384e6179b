import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curved_nbody import H3, S3, Configuration, integrals
from curved_nbody.dynamics import (
    INTEGRAL_NAMES, accelerations, angular_momentum, force_function, gram, kinetic_energy,
)
from curved_nbody.errors import Singular
from curved_nbody.manifold import inner

from .conftest import random_configuration


def _fd_gradient(config, i, eps=1e-6):
    """Central differences of the force function in body i's ambient coordinates."""
    g = np.zeros(4)
    for k in range(4):
        e = np.zeros_like(config.positions)
        e[i, k] = eps
        up = force_function(Configuration(config.space, config.masses, config.positions + e, config.velocities, tol=1.0))
        dn = force_function(Configuration(config.space, config.masses, config.positions - e, config.velocities, tol=1.0))
        g[k] = (up - dn) / (2 * eps)
    return g


@pytest.mark.parametrize("space", [S3, H3], ids=["S3", "H3"])
@pytest.mark.parametrize("seed", range(4))
def test_acceleration_is_projected_gradient(space, seed):
    rng = np.random.default_rng(seed)
    c = random_configuration(rng, space, 3)
    A = accelerations(space, c.masses, c.positions, np.zeros_like(c.velocities))
    for i in range(c.n):
        q = c.positions[i]
        g = space.metric * _fd_gradient(c, i)
        g = g - space.sigma * inner(space, q, g) * q
        assert np.allclose(A[i], g / c.masses[i], atol=1e-7)


@pytest.mark.parametrize("space", [S3, H3], ids=["S3", "H3"])
def test_velocity_term_keeps_motion_on_manifold(space):
    # second derivative of q.q vanishes iff q.a = -v.v
    rng = np.random.default_rng(7)
    c = random_configuration(rng, space, 4)
    A = accelerations(space, c.masses, c.positions, c.velocities)
    qa = inner(space, c.positions, A)
    vv = inner(space, c.velocities, c.velocities)
    assert np.allclose(qa, -vv, atol=1e-10)


def _rotation(space, rng):
    """Random isometry: an SO(4) or SO(3,1) element built from plane rotations and boosts."""
    M = np.eye(4)
    for a, b in [(0, 1), (0, 2), (1, 2)]:
        t = rng.uniform(0, 2 * math.pi)
        R = np.eye(4)
        R[[a, a, b, b], [a, b, a, b]] = [math.cos(t), -math.sin(t), math.sin(t), math.cos(t)]
        M = R @ M
    for a in range(3):
        t = rng.uniform(-1, 1)
        R = np.eye(4)
        if space.sigma == 1:
            R[[a, a, 3, 3], [a, 3, a, 3]] = [math.cos(t), -math.sin(t), math.sin(t), math.cos(t)]
        else:
            R[[a, a, 3, 3], [a, 3, a, 3]] = [math.cosh(t), math.sinh(t), math.sinh(t), math.cosh(t)]
        M = R @ M
    return M


@pytest.mark.parametrize("space", [S3, H3], ids=["S3", "H3"])
def test_force_function_isometry_invariant(space):
    rng = np.random.default_rng(3)
    c = random_configuration(rng, space, 4)
    M = _rotation(space, rng)
    moved = Configuration(space, c.masses, c.positions @ M.T, c.velocities @ M.T)
    assert force_function(moved) == pytest.approx(force_function(c), rel=1e-12)
    assert kinetic_energy(moved) == pytest.approx(kinetic_energy(c), rel=1e-12)
    assert np.allclose(gram(space, moved.positions), gram(space, c.positions), atol=1e-12)


def test_two_body_force_function_closed_form():
    # separation angle d on S3: U = m1 m2 cot d
    d = 0.7
    c = Configuration(S3, [2.0, 3.0], [[1, 0, 0, 0], [math.cos(d), math.sin(d), 0, 0]], np.zeros((2, 4)))
    assert force_function(c) == pytest.approx(6.0 / math.tan(d), rel=1e-14)
    # hyperbolic distance d on H3: U = m1 m2 coth d
    c = Configuration(H3, [2.0, 3.0], [[0, 0, 0, 1], [math.sinh(d), 0, 0, math.cosh(d)]], np.zeros((2, 4)))
    assert force_function(c) == pytest.approx(6.0 / math.tanh(d), rel=1e-14)


def test_angular_momentum_of_uniform_rotation():
    c = Configuration(S3, [2.0], [[1, 0, 0, 0]], [[0, 3, 0, 0]])
    L = angular_momentum(c.masses, c.positions, c.velocities)
    assert L["wx"] == 6.0 and all(L[p] == 0.0 for p in L if p != "wx")


def test_integrals_order():
    c = Configuration(S3, [1.0, 1.0], [[1, 0, 0, 0], [0, 1, 0, 0]], [[0, 0, 1, 0], [0, 0, 0, 1]])
    I = integrals(c)
    assert INTEGRAL_NAMES[0] == "h" and I.as_array()[0] == I.h
    assert I.h == pytest.approx(1.0)  # U vanishes at a right angle


@given(st.sampled_from([S3, H3]), st.integers(0, 10_000))
def test_configuration_validation(space, seed):
    c = random_configuration(np.random.default_rng(seed), space, 2)
    assert not c.positions.flags.writeable
    bad = c.positions.copy()
    bad[0] *= 1.01
    with pytest.raises(ValueError, match="not admissible"):
        Configuration(space, c.masses, bad, c.velocities)


def test_configuration_rejects_bad_input():
    with pytest.raises(ValueError, match="inconsistent"):
        Configuration(S3, [1.0, 1.0], [[1, 0, 0, 0]], [[0, 0, 0, 0]])
    with pytest.raises(ValueError, match="positive"):
        Configuration(S3, [-1.0], [[1, 0, 0, 0]], [[0, 0, 0, 0]])
    with pytest.raises(ValueError, match="upper sheet"):
        Configuration(H3, [1.0], [[0, 0, 0, -1]], [[0, 0, 0, 0]])


def test_collision_and_antipode_are_singular():
    for q2 in ([1, 0, 0, 0], [-1, 0, 0, 0]):
        c = Configuration(S3, [1.0, 1.0], [[1, 0, 0, 0], q2], np.zeros((2, 4)))
        with pytest.raises(Singular):
            force_function(c)
