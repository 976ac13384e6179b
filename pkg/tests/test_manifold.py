import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curved_nbody import H3, S3
from curved_nbody.errors import DegeneratePoint, OffManifold
from curved_nbody.manifold import (
    CylinderCoords, TorusCoords, as_space, constraint_residuals, cylinder_coords, foliation_radii,
    from_cylinder, from_torus, inner, project, project_many, torus_coords,
)

from .conftest import spaces, vec4

angle = st.floats(min_value=0.0, max_value=2 * math.pi - 1e-9)


def test_space_names_and_metric():
    assert as_space("s3") is S3 and as_space(" H3 ") is H3
    assert as_space(-1) == H3
    assert np.array_equal(H3.metric, [1, 1, 1, -1])
    with pytest.raises(ValueError):
        as_space("R3")
    with pytest.raises(ValueError):
        as_space(0)


@given(spaces, vec4, vec4)
def test_inner_is_symmetric_bilinear(space, p, q):
    assert inner(space, p, q) == pytest.approx(inner(space, q, p))
    assert inner(space, 2 * p, q) == pytest.approx(2 * inner(space, p, q), abs=1e-12)


@given(vec4, vec4)
def test_project_lands_on_sphere(p, v):
    if np.linalg.norm(p) < 1e-3:
        return
    q, w = project(S3, p, v)
    a, b = constraint_residuals(S3, q, w)
    assert abs(a) < 1e-14 and abs(b) < 1e-12 * max(1.0, np.linalg.norm(v))


@given(vec4, vec4)
def test_project_lands_on_upper_sheet(p, v):
    p = p.copy()
    p[3] = abs(p[3]) + math.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2) + 0.1
    q, w = project(H3, p, v)
    a, b = constraint_residuals(H3, q, w)
    scale = max(1.0, float(np.dot(q, q)))
    assert q[3] >= 1 and abs(a) < 1e-13 * scale
    assert abs(b) < 1e-12 * scale * max(1.0, np.linalg.norm(v))


def test_project_rejects_light_cone_and_lower_sheet():
    with pytest.raises(DegeneratePoint):
        project(H3, [1, 0, 0, 1], [0, 0, 0, 0])
    with pytest.raises(DegeneratePoint):
        project(H3, [0, 0, 0, -2], [0, 0, 0, 0])
    with pytest.raises(DegeneratePoint):
        project(S3, [0, 0, 0, 0], [1, 0, 0, 0])


def test_project_many_reports_correction():
    Q = np.array([[2.0, 0, 0, 0], [0, 0, 0, 1.0]])
    V = np.array([[1.0, 1, 0, 0], [0, 0, 0, 0]])
    Qn, Vn, corr = project_many(S3, Q, V)
    assert np.allclose(Qn[0], [1, 0, 0, 0]) and np.allclose(Vn[0], [0, 1, 0, 0])
    assert corr == pytest.approx(1.0)


@given(st.floats(0.0, 1.0), angle, angle)
def test_torus_round_trip(r, theta, phi):
    c = TorusCoords(r, theta, math.sqrt(1 - r * r), phi)
    back = torus_coords(from_torus(c))
    assert back.r == pytest.approx(r, abs=1e-12)
    assert back.rho == pytest.approx(c.rho, abs=1e-12)
    if r > 1e-6:
        assert math.cos(back.theta - theta) == pytest.approx(1.0, abs=1e-9)
    if c.rho > 1e-6:
        assert math.cos(back.phi - phi) == pytest.approx(1.0, abs=1e-9)


@given(st.floats(0.0, 5.0), angle, st.floats(-4.0, 4.0))
def test_cylinder_round_trip(r, theta, xi):
    c = CylinderCoords(r, theta, math.sqrt(1 + r * r), xi)
    back = cylinder_coords(from_cylinder(c))
    assert back.r == pytest.approx(r, abs=1e-9)
    assert back.rho == pytest.approx(c.rho, rel=1e-9)
    assert back.xi == pytest.approx(xi, abs=1e-9)


def test_degenerate_angle_is_zero():
    assert torus_coords([0, 0, 0.6, 0.8]).theta == 0.0
    assert torus_coords([0.6, 0.8, 0, 0]).phi == 0.0


def test_off_manifold_rejected():
    with pytest.raises(OffManifold):
        torus_coords([1, 1, 0, 0])
    with pytest.raises(OffManifold):
        cylinder_coords([0, 0, 0, 2])


def test_foliation_radii_vectorised():
    P = np.array([[0.6, 0, 0, 0.8], [0, 0, 0, 1.0]])
    r, rho = foliation_radii(S3, P)
    assert np.allclose(r, [0.6, 0]) and np.allclose(rho, [0.8, 1])
    r, rho = foliation_radii(H3, [[3.0, 0, 0, math.sqrt(10)]])
    assert r[0] == 3 and rho[0] == pytest.approx(math.sqrt(10))
