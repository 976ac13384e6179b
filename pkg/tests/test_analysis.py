import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from curved_nbody import H3, S3, Configuration, IntegratorSettings, simulate_full
from curved_nbody.analysis import (
    Polynomial, Verdict, cauchy_bound, confinement_report, descartes_positive_count, isolate_real_roots,
    positive_root_count, return_map, rotation_signature, section_crossings, square_free_factors,
)

small_int = st.integers(-6, 6)


def _from_roots(roots, lead=1):
    """Ascending coefficients of lead * prod (x - r)."""
    c = np.array([float(lead)])
    for r in roots:
        c = np.convolve(c, [-r, 1.0])
    return Polynomial(tuple(c))


def _sympy_real_roots(p):
    x = sp.Symbol("x")
    expr = sum(sp.Rational(Fraction(c)) * x**k for k, c in enumerate(p.coeffs))
    return sorted(float(r) for r in sp.Poly(expr, x).real_roots())


@given(st.lists(small_int, min_size=1, max_size=6), st.sampled_from([1, -2, 3]))
def test_roots_match_sympy(roots, lead):
    p = _from_roots(roots, lead)
    found = isolate_real_roots(p)
    expected = _sympy_real_roots(p)
    assert sum(r.multiplicity for r in found) == len(expected)
    distinct = sorted(set(expected))
    assert [r.root for r in found] == pytest.approx(distinct, abs=1e-10)
    for r in found:
        assert r.lo <= r.root <= r.hi
        assert r.multiplicity == expected.count(min(distinct, key=lambda e: abs(e - r.root)))


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=8))
def test_descartes_bounds_and_parity(coeffs):
    assume(coeffs[-1] != 0 and coeffs[0] != 0)
    p = Polynomial(tuple(float(c) for c in coeffs))
    d = descartes_positive_count(p)
    n = positive_root_count(p)
    assert n <= d and (d - n) % 2 == 0


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=8))
def test_cauchy_bound_contains_roots(coeffs):
    assume(coeffs[-1] != 0)
    p = Polynomial(tuple(float(c) for c in coeffs))
    roots = np.roots(list(reversed(coeffs)))
    assert np.all(np.abs(roots) <= cauchy_bound(p) + 1e-9)


def test_square_free_factors():
    p = _from_roots([1, 1, 1, 2, 2, 3])
    facs = {k: [float(c) for c in f] for f, k in square_free_factors(p)}
    assert set(facs) == {1, 2, 3}
    for k, root in ((1, 3.0), (2, 2.0), (3, 1.0)):
        f = facs[k]
        assert len(f) == 2 and -f[0] / f[1] == pytest.approx(root)


def test_isolation_respects_interval_and_endpoint_roots():
    p = _from_roots([0.0, 1.0, 2.0])
    assert [r.root for r in isolate_real_roots(p, (0.0, 2.0))] == pytest.approx([1.0])
    assert [r.root for r in isolate_real_roots(p, (0.5, math.inf))] == pytest.approx([1.0, 2.0])
    assert isolate_real_roots(p, (3.0, 2.0)) == []


def test_clustered_roots_separated():
    p = _from_roots([1.0, 1.0 + 1e-7])
    roots = isolate_real_roots(p, tol=1e-15)
    # compare against the exact roots of the float coefficients; rounding them moved the roots by ~1e-9
    assert [r.root for r in roots] == pytest.approx(_sympy_real_roots(p), abs=1e-14)


def test_zero_and_constant_polynomials():
    with pytest.raises(ValueError):
        isolate_real_roots(Polynomial((0.0,)))
    with pytest.raises(ValueError):
        descartes_positive_count(Polynomial((0.0, 0.0)))
    assert isolate_real_roots(Polynomial((3.0,))) == []


def test_polynomial_trims_and_evaluates():
    p = Polynomial((1.0, 2.0, 0.0, 0.0))
    assert p.degree == 1 and p(2.0) == 5.0
    assert p.exact(Fraction(1, 3)) == Fraction(5, 3)
    assert Polynomial((1.0, 0.0, 3.0)).derivative().coeffs == (0.0, 6.0)


def test_sections_of_oscillator():
    t = np.linspace(0, 6 * math.pi, 3001)
    x, v = np.cos(t), -np.sin(t)
    hits = section_crossings(t, x, v)
    assert len(hits) == 2  # maxima at 2pi and 4pi (t=0 has v=0, not a crossing)
    assert [h.t for h in hits] == pytest.approx([2 * math.pi, 4 * math.pi], abs=1e-5)
    up = section_crossings(t, x, v, direction=1)
    assert [h.x for h in up] == pytest.approx([-1.0] * 3, abs=1e-5)
    rm = return_map(t, x, v)
    assert rm.period == pytest.approx(2 * math.pi, abs=1e-5) and rm.distance < 1e-5


def test_return_map_needs_two_crossings():
    t = np.linspace(0, 1, 11)
    rm = return_map(t, t, -np.ones_like(t))
    assert math.isnan(rm.period) and math.isnan(rm.distance) and rm.crossings == ()


def test_confinement_of_torus_rotation():
    # equal rates in both planes: a great circle that stays on its Clifford torus
    r, rho = 0.6, 0.8
    c = Configuration(S3, [1.0], [[r, 0, rho, 0]], [[0, r, 0, rho]])
    tr = simulate_full(c, IntegratorSettings(t_end=5.0, samples=51))
    rep = confinement_report(tr)
    assert rep.verdict is Verdict.AllConfined and rep.max_variation < 1e-10
    sig = rotation_signature(tr)
    # c_wz = r rho and c_xy = -r rho for this orbit
    assert sig == {"wx": True, "wy": False, "wz": True, "xy": True, "xz": False, "yz": True}


def test_confinement_broken_by_radial_motion():
    c = Configuration(H3, [1.0], [[0, 0, 0, 1]], [[0.5, 0, 0, 0]])
    tr = simulate_full(c, IntegratorSettings(t_end=2.0, samples=21))
    rep = confinement_report(tr)
    assert rep.verdict is Verdict.CrossesContinuum and rep.worst_body == 0
