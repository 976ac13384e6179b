import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from curved_nbody import H3, S3, Configuration, IntegratorSettings, lift, simulate_full, simulate_reduced
from curved_nbody.dynamics import accelerations
from curved_nbody.errors import StepUnderflow
from curved_nbody.integrate import integrate_ode
from curved_nbody.manifold import inner
from curved_nbody.rotopulse import CriterionSystem
from curved_nbody.verification import lift_cases, pe_lagrangian


def _oscillator(y):
    return np.array([y[1], -y[0]])


def test_oscillator_accuracy_and_samples():
    st = IntegratorSettings(t_end=2 * math.pi, samples=65)
    ts, ys, stats = integrate_ode(_oscillator, [1.0, 0.0], st)
    assert np.array_equal(ts, st.sample_times())
    assert np.max(np.abs(ys[:, 0] - np.cos(ts))) < 1e-9
    assert stats["steps"] > 0 and stats["nfev"] >= 6 * stats["steps"]


@pytest.mark.parametrize("which", ["step", "dense"])
def test_convergence_order(which):
    """Fixed steps: global error of the steps and of the dense output both fall like h^5."""
    errs = []
    for h in (0.1, 0.05, 0.025):
        st = IntegratorSettings(rel_tol=1.0, abs_tol=1.0, h_init=h, h_min=h, h_max=h, t_end=2.0, samples=2)
        times = [0.0, 2.0] if which == "step" else [0.0, 2.0 - 0.37 * h]
        ts, ys, _ = integrate_ode(_oscillator, [1.0, 0.0], st, sample_times=times)
        t = ts[-1]
        errs.append(math.hypot(ys[-1, 0] - math.cos(t), ys[-1, 1] + math.sin(t)))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(o > 4.7 for o in orders), orders


def test_step_underflow_carries_partial():
    st = IntegratorSettings(h_init=1e-3, h_min=1e-3, h_max=1e-3, rel_tol=1e-14, abs_tol=1e-16, t_end=1.0, samples=11)
    with pytest.raises(StepUnderflow) as info:
        integrate_ode(lambda y: np.array([y[0] ** 2]), [50.0], st)
    ts, ys, _ = info.value.partial
    assert len(ts) == len(ys) >= 1


def test_bad_sample_times():
    with pytest.raises(ValueError):
        integrate_ode(_oscillator, [1.0, 0.0], IntegratorSettings(), sample_times=[0.0, 1.0, 1.0])


def test_settings_validation():
    with pytest.raises(ValueError):
        IntegratorSettings(h_min=1.0, h_init=0.1)
    with pytest.raises(ValueError):
        IntegratorSettings(samples=1)


@pytest.mark.parametrize("space", [S3, H3], ids=["S3", "H3"])
def test_single_body_follows_geodesic(space):
    q0 = np.array([0.0, 0.0, 0.0, 1.0])
    v0 = np.array([0.0, 0.8, 0.0, 0.0])
    st = IntegratorSettings(t_end=5.0, samples=51)
    tr = simulate_full(Configuration(space, [1.0], [q0], [v0]), st)
    s = 0.8 * tr.times
    if space.sigma == 1:
        exact = np.outer(np.cos(s), q0) + np.outer(np.sin(s), v0 / 0.8)
    else:
        exact = np.outer(np.cosh(s), q0) + np.outer(np.sinh(s), v0 / 0.8)
    assert np.max(np.abs(tr.positions[:, 0] - exact)) < 1e-9


def _two_body(space):
    if space.sigma == 1:
        Q = [[1.0, 0, 0, 0], [0.0, 0.8, 0.6, 0]]
        V = [[0, 0.3, 0, 0.4], [0.2, 0, 0, -0.5]]
    else:
        Q = [[0, 0, 0, 1.0], [0.6, 0, 0, math.sqrt(1.36)]]
        V = [[0, 1.2, 0.1, 0], [0, -0.6, 0, 0]]
    return Configuration(space, [1.0, 2.0], Q, V)


@pytest.mark.parametrize("space", [S3, H3], ids=["S3", "H3"])
def test_projection_keeps_constraints(space):
    tr = simulate_full(_two_body(space), IntegratorSettings(t_end=5.0, samples=101))
    P, V = tr.positions, tr.velocities
    assert np.max(np.abs(inner(space, P, P) - space.sigma)) <= 1e-12
    assert np.max(np.abs(inner(space, P, V))) <= 1e-12
    assert tr.stats["projections"] == tr.stats["steps"]


@pytest.mark.parametrize("space", [S3, H3], ids=["S3", "H3"])
def test_matches_scipy_dop853(space):
    c = _two_body(space)
    st = IntegratorSettings(t_end=5.0, samples=11, rel_tol=1e-11, abs_tol=1e-13)
    ours = simulate_full(c, st)

    def f(t, y):
        Q, V = y[:8].reshape(2, 4), y[8:].reshape(2, 4)
        return np.concatenate([y[8:], accelerations(space, c.masses, Q, V).ravel()])

    ref = solve_ivp(f, (0, 5), c.state_vector(), method="DOP853", t_eval=ours.times, rtol=1e-13, atol=1e-14)
    assert np.max(np.abs(ours.states - ref.y.T)) < 1e-8


@pytest.mark.parametrize("space", [S3, H3], ids=["S3", "H3"])
def test_integrals_conserved(space):
    tr = simulate_full(_two_body(space), IntegratorSettings(t_end=10.0, samples=101))
    d = tr.drift()
    assert d["h"]["rel"] < 1e-8
    assert max(v["abs"] for v in d.values()) < 1e-8


def test_drift_uses_absolute_scale_for_vanishing_integrals():
    tr = simulate_full(Configuration(S3, [1.0], [[1, 0, 0, 0]], [[0, 1, 0, 0]]), IntegratorSettings(t_end=1.0, samples=11))
    d = tr.drift()
    assert d["c_yz"]["initial"] == 0.0 and d["c_yz"]["rel"] == d["c_yz"]["abs"]


@pytest.mark.parametrize("label,ansatz,state", lift_cases(), ids=[c[0] for c in lift_cases()])
def test_reduced_and_full_agree(label, ansatz, state):
    st = IntegratorSettings(t_end=10.0, samples=201)
    red = simulate_reduced(CriterionSystem(ansatz), state, st)
    full = simulate_full(lift(ansatz, state), st)
    # the ne lift amplifies error through the cosh growth of its angle; its bound is looser
    tol = 1e-5 if label == "ne" else 1e-6
    assert np.max(np.abs(red.positions - full.positions)) < tol
    assert np.max(np.abs(red.velocities - full.velocities)) < tol


@pytest.mark.xfail(strict=True, reason=(
    "the equilateral pe orbit at z0=0.5 is linearly unstable to symmetry breaking; rounding noise grows "
    "about e^1.4t and reaches ~5e-6 by t=10, and tighter tolerances do not reduce it"))
def test_pe_lagrangian_half_height_lift_consistency():
    ansatz, state = pe_lagrangian()
    st = IntegratorSettings(t_end=10.0, samples=201)
    red = simulate_reduced(CriterionSystem(ansatz), state, st)
    full = simulate_full(lift(ansatz, state), st)
    assert np.max(np.abs(red.positions - full.positions)) < 1e-6
