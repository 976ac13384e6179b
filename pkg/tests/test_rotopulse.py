import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curved_nbody import Ansatz, IntegratorSettings, Kind, Verdict, classify, integrals, lift, simulate_reduced
from curved_nbody.dynamics import gram
from curved_nbody.errors import DegenerateRadius, UnsupportedClass
from curved_nbody.families import THIRDS, FamilySystem, family, fixed_points
from curved_nbody.rotopulse import (
    CriterionSystem, angular_residuals, angular_velocity, as_kind, max_pair_variation, pair_q, radii,
    reduced_energy, rotation_momenta,
)
from curved_nbody.verification import lift_cases, pe_lagrangian

CASES = lift_cases()
IDS = [c[0] for c in CASES]

small = st.floats(-0.5, 0.5)


def _random_state(kind, rng, n):
    """Generic (asymmetric) reduced state inside the domain of the class."""
    u = rng.uniform(-0.3, 0.3, size=(4, n))
    if kind is Kind.PositiveElliptic:
        pos = rng.uniform(-0.5, 0.5, size=(2, n))
    elif kind is Kind.NegativeElliptic:
        pos = np.vstack([rng.uniform(-0.5, 0.5, n), rng.uniform(1.3, 2.0, n)])
    elif kind is Kind.NegativeHyperbolic:
        pos = rng.uniform(-1.0, 1.0, size=(2, n))
    else:
        r = rng.uniform(0.3, 0.8, n)
        return np.concatenate([r, u[0], [0.4, 0.9]])
    return np.concatenate([pos[0], pos[1], u[0], u[1], [0.3]])


@pytest.mark.parametrize("label,ansatz,state", CASES, ids=IDS)
def test_pair_q_matches_lifted_gram(label, ansatz, state):
    rng = np.random.default_rng(11)
    for y in (state, _random_state(ansatz.kind, rng, ansatz.n)):
        c = lift(ansatz, y)
        assert np.allclose(pair_q(ansatz, y), gram(ansatz.space, c.positions), atol=1e-12)


@pytest.mark.parametrize("label,ansatz,state", CASES, ids=IDS)
def test_conservation_expressions_match_lift(label, ansatz, state):
    rng = np.random.default_rng(5)
    for y in (state, _random_state(ansatz.kind, rng, ansatz.n)):
        I = integrals(lift(ansatz, y))
        assert reduced_energy(ansatz, y) == pytest.approx(I.h, rel=1e-11, abs=1e-11)
        mom = rotation_momenta(ansatz, y)
        assert mom["c_wx"] == pytest.approx(I.c_wx, rel=1e-11, abs=1e-11)
        assert mom["c_yz"] == pytest.approx(I.c_yz, rel=1e-11, abs=1e-11)


@pytest.mark.parametrize("label,ansatz,state", CASES, ids=IDS)
def test_angular_velocity_reproduces_constants(label, ansatz, state):
    mom = rotation_momenta(ansatz, state)
    k = ansatz.kind
    if k in (Kind.PositiveElliptic, Kind.NegativeElliptic):
        assert mom["c_wx"] == pytest.approx(ansatz.constants[0])
    elif k is Kind.NegativeHyperbolic:
        assert mom["c_yz"] == pytest.approx(-ansatz.constants[0])
    else:
        assert mom["c_wx"] == pytest.approx(ansatz.constants[0])
        sign = 1 if k is Kind.PositiveEllipticElliptic else -1
        assert mom["c_yz"] == pytest.approx(sign * ansatz.constants[1])


def test_pee_angular_velocity_closed_form():
    a = Ansatz("pee", (1.0, 2.0), (0.6, 0.3), a=(0, 1), b=(0, 2))
    r = np.array([0.5, 0.4])
    ad, bd = angular_velocity(a, np.concatenate([r, [0, 0], [0, 0]]))
    S = 0.25 + 2 * 0.16
    assert ad == pytest.approx(0.6 / S) and bd == pytest.approx(0.3 / (3 - S))


def test_pee_denominator_vanishes():
    a = Ansatz("pee", (1.0, 1.0), (1.0, 1.0))
    with pytest.raises(DegenerateRadius):
        angular_velocity(a, [0.0, 0.0, 0, 0, 0, 0])


@given(small, small)
def test_pe_radius(y, z):
    a = Ansatz("pe", (1.0,), (1.0,))
    assert radii(a, [y, z, 0, 0, 0])[0] == pytest.approx(math.sqrt(1 - y * y - z * z))


@pytest.mark.parametrize("label,ansatz,state", CASES, ids=IDS)
def test_symmetric_states_satisfy_angular_equations(label, ansatz, state):
    assert np.max(np.abs(angular_residuals(ansatz, state))) < 1e-12


def test_asymmetric_triangle_violates_angular_equations():
    ansatz, state = pe_lagrangian()
    y = state.copy()
    y[3] = 0.3  # one body lower than the others
    assert np.max(np.abs(angular_residuals(ansatz, y))) > 1e-3


def test_parabolic_class_unsupported():
    with pytest.raises(UnsupportedClass):
        Ansatz("parabolic", (1.0, 1.0), (1.0,))


def test_ansatz_validation():
    assert as_kind("PositiveElliptic") is Kind.PositiveElliptic
    with pytest.raises(ValueError):
        as_kind("xx")
    with pytest.raises(ValueError, match="momentum constant"):
        Ansatz("pee", (1.0,), (1.0,))
    with pytest.raises(ValueError, match="nonzero"):
        Ansatz("pe", (1.0,), (0.0,))
    with pytest.raises(ValueError, match="positive"):
        Ansatz("pe", (0.0,), (1.0,))
    with pytest.raises(ValueError, match="one entry per body"):
        Ansatz("pe", (1.0, 1.0), (1.0,), a=(0.0,))
    with pytest.raises(ValueError, match="length"):
        pair_q(Ansatz("pe", (1.0,), (1.0,)), [0.0, 0.0])


def test_dimensions():
    assert Ansatz("pe", (1.0,) * 3, (1.0,)).dim == 13
    assert Ansatz("neh", (1.0,) * 2, (1.0, 1.0)).dim == 6


@pytest.mark.parametrize("label,ansatz,state", CASES, ids=IDS)
def test_criterion_monitors_conserved(label, ansatz, state):
    tr = simulate_reduced(CriterionSystem(ansatz), state, IntegratorSettings(t_end=5.0, samples=51))
    for key in ("energy", "c_wx", "c_yz"):
        series = tr.monitors[key]
        assert np.max(np.abs(series - series[0])) < 1e-8 * max(1.0, abs(series[0]))


def test_classify_pulsating_triangle():
    ansatz, state = pe_lagrangian(c=2.0, z0=0.7)
    tr = simulate_reduced(CriterionSystem(ansatz), state, IntegratorSettings(t_end=5.0, samples=101))
    tr.ansatz = ansatz
    assert classify(tr) is Verdict.Rotopulsator
    assert max_pair_variation(tr) > 1e-2


def test_classify_relative_equilibrium():
    spec = family("2b-pee", m=1.0, c1=1.0, c2=1.0)
    (fp,) = fixed_points(spec)
    system = FamilySystem(spec)
    tr = simulate_reduced(system, system.initial_state(fp.state[0], 0.0), IntegratorSettings(t_end=5.0, samples=51))
    assert classify(tr) is Verdict.RelativeEquilibrium
    with pytest.raises(ValueError):
        classify(tr.__class__(tr.times[:3], tr.states[:3], system=tr.system))


def test_lift_angles_override():
    ansatz, state = pe_lagrangian()
    c0 = lift(ansatz, state)
    c1 = lift(ansatz, state, alpha=0.4)
    assert np.allclose(gram(ansatz.space, c0.positions), gram(ansatz.space, c1.positions), atol=1e-14)
    assert not np.allclose(c0.positions, c1.positions)
    assert np.allclose(lift(ansatz, state).positions[:, :2], lift(ansatz, state).positions[:, :2])


def test_lagrangian_layout():
    ansatz, _ = pe_lagrangian()
    assert ansatz.a == THIRDS
