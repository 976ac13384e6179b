"""Numerical acceptance checks, shared by ``curved-nbody verify`` and the test suite.

Each check returns a :class:`CheckResult`. ``passed`` is decided at the stated
tolerance; ``details`` keeps the measured numbers so a failure can be read off
the JSON report. Nothing here loosens a threshold: when the dynamics or the
algebra disagree with the expected outcome the check fails and says why.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analysis import (
    Verdict as Confinement,
    confinement_report,
    descartes_positive_count,
    foliation_radii_series,
    isolate_real_roots,
    return_map,
    rotation_signature,
)
from .dynamics import MOMENTUM_PLANES
from .errors import DomainExit, SingularityReached, StepUnderflow
from .families import (
    THIRDS,
    FamilySystem,
    energy_on_family,
    family,
    fixed_points,
    lift as lift_family,
    ne_energy_polynomial,
    pe_energy_polynomial,
)
from .integrate import IntegratorSettings, simulate_full, simulate_reduced
from .rotopulse import Ansatz, CriterionSystem, Verdict, classify, lift, max_pair_variation

_ABORTS = (StepUnderflow, DomainExit, SingularityReached)


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:>2}. {self.title}: {self.summary}"


def _timed(number, title):
    def wrap(fn):
        def run(**kw):
            t0 = time.perf_counter()
            res = fn(**kw)
            res.number, res.title = number, title
            res.seconds = time.perf_counter() - t0
            return res
        run.__name__ = fn.__name__
        run.number = number
        run.title = title
        return run
    return wrap


def pe_lagrangian(m=1.0, c=1.0, z0=0.5, v0=0.0):
    """Equilateral triangle at height z0 rotating in the wx-plane."""
    ansatz = Ansatz("pe", (m,) * 3, (c,), a=THIRDS)
    state = np.array([0.0] * 3 + [z0] * 3 + [0.0] * 3 + [v0] * 3 + [0.0])
    return ansatz, state


def _run_full(config, settings):
    """Full integration; an abort returns the partial trajectory and the exception."""
    try:
        return simulate_full(config, settings), None
    except _ABORTS as exc:
        return exc.trajectory, exc


@_timed(1, "conservation drift, PE Lagrangian m=1 c=1 z0=0.5 over [0,50]")
def conservation_drift(t_end=50.0, drift_tol=1e-6, zero_tol=1e-9):
    ansatz, state = pe_lagrangian()
    settings = IntegratorSettings(rel_tol=1e-10, t_end=t_end, samples=501)
    tr, abort = _run_full(lift(ansatz, state), settings)
    drift = tr.drift()
    worst = max(d["rel"] for d in drift.values())
    zero = {p: float(np.nanmax(np.abs(tr.integrals[:, 1 + k]))) for k, p in enumerate(MOMENTUM_PLANES) if p != "wx"}
    t_reached = float(tr.times[-1])
    ok = abort is None and worst <= drift_tol and max(zero.values()) <= zero_tol
    summary = f"max drift {worst:.2e} (tol {drift_tol:g}), max |c_other| {max(zero.values()):.2e}, reached t={t_reached:.3f}"
    if abort is not None:
        summary += f", aborted: {type(abort).__name__}"
    # how far the three mutual distances have split apart
    G = tr.pair_grams()
    q = np.stack([G[:, 0, 1], G[:, 0, 2], G[:, 1, 2]], axis=1)
    asym = np.ptp(q, axis=1)
    first = np.flatnonzero(asym > 1e-3)
    early = tr.times <= 20.0
    h = tr.integrals[early, 0]
    details = {
        "drift": drift,
        "energy_drift_first_20": float(np.max(np.abs(h - h[0])) / abs(h[0])),
        "zero_momenta": zero,
        "t_reached": t_reached,
        "abort": None if abort is None else str(abort),
        "symmetry_broken_at": float(tr.times[first[0]]) if first.size else None,
    }
    return CheckResult(1, "", ok, summary, details)


def lift_cases():
    """One symmetric trajectory per rotation class: (label, ansatz, criterion state)."""
    return [
        ("pe", *pe_lagrangian(c=2.0, z0=0.7)),
        ("pee", Ansatz("pee", (1.0, 1.0), (1.0, 0.5), a=(0.0, math.pi), b=(0.0, 0.0)),
         np.array([0.6, 0.6, 0.0, 0.0, 0.0, 0.0])),
        ("ne", Ansatz("ne", (1.0,) * 3, (1.0,), a=THIRDS),
         np.array([0.0] * 3 + [1.5] * 3 + [0.0] * 6 + [0.0])),
        ("nh", Ansatz("nh", (1.0, 1.0), (1.0,), b=(0.0, 0.0)),
         np.array([0.0, 0.0, 1.3, -1.3, 0.0, 0.0, 0.0, 0.0, 0.0])),
        ("neh", Ansatz("neh", (1.0, 1.0), (1.0, 0.7), a=(0.0, math.pi), b=(0.0, 0.0)),
         np.array([0.8, 0.8, 0.0, 0.0, 0.0, 0.0])),
    ]


@_timed(2, "criterion lift-consistency, five classes over [0,10]")
def lift_consistency(t_end=10.0, tol=1e-6):
    settings = IntegratorSettings(t_end=t_end, samples=201)
    dev = {}
    for label, ansatz, state in lift_cases():
        red = simulate_reduced(CriterionSystem(ansatz), state, settings)
        full = simulate_full(lift(ansatz, state), settings)
        dev[label] = float(max(np.max(np.abs(red.positions - full.positions)),
                               np.max(np.abs(red.velocities - full.velocities))))
    worst = max(dev.values())
    summary = ", ".join(f"{k} {v:.1e}" for k, v in dev.items()) + f" (tol {tol:g})"
    return CheckResult(2, "", worst <= tol, summary, {"deviation": dev})


@_timed(3, "elliptic-elliptic Lagrangian: q_ij = -1/2 and confinement over [0,20]")
def pee_lagrangian_equilibrium(t_end=20.0, tol=1e-9):
    settings = IntegratorSettings(t_end=t_end, samples=401)
    starts = [(1.0, 1.0, 1 / math.sqrt(2), 0.0), (1.0, 1.0, 0.6, 0.05), (2.0, 1.0, 0.5, -0.1), (0.5, 1.5, 0.4, 0.0)]
    q_dev = {}
    verdicts = {}
    for c1, c2, r, u in starts:
        system = FamilySystem(family("Lagrangian-ee", m=1.0, c1=c1, c2=c2))
        tr = simulate_reduced(system, system.initial_state(r, u), settings)
        G = tr.pair_grams()
        iu = np.triu_indices(3, 1)
        key = f"c=({c1:g},{c2:g}) r0={r:.4g} u0={u:g}"
        q_dev[key] = float(np.max(np.abs(G[:, iu[0], iu[1]] + 0.5)))
        verdicts[key] = confinement_report(tr).verdict.value
    # confinement on the canonical tori holds at the fixed point r = 1/sqrt(2)
    spec = family("Lagrangian-ee", m=1.0, c1=1.0, c2=1.0)
    system = FamilySystem(spec)
    (fp,) = fixed_points(spec)
    at_fixed = simulate_reduced(system, system.initial_state(*fp.state), settings)
    rep = confinement_report(at_fixed)
    full, abort = _run_full(lift_family(spec, fp.state), settings)
    full_var = max_pair_variation(full)
    ok = max(q_dev.values()) <= tol and rep.verdict is Confinement.AllConfined
    summary = (f"max |q_ij + 1/2| {max(q_dev.values()):.1e} (tol {tol:g}); fixed point {rep.verdict.value} "
               f"(variation {rep.max_variation:.1e}); full-system pair drift from the fixed point {full_var:.1e}")
    return CheckResult(3, "", ok, summary, {
        "q_deviation": q_dev,
        "canonical_confinement": verdicts,
        "fixed_point_variation": rep.max_variation,
        "full_system_pair_variation": full_var,
        "full_system_abort": None if abort is None else str(abort),
    })


@_timed(4, "Lagrangian-ee fixed points r = 1/sqrt(2) and sqrt(2/3)")
def lagrangian_ee_fixed_points():
    a = fixed_points(family("Lagrangian-ee", m=1, c1=1, c2=1))
    b = fixed_points(family("Lagrangian-ee", m=1, c1=2, c2=1))
    ok = (len(a) == 1 and abs(a[0].state[0] - 1 / math.sqrt(2)) <= 1e-12
          and len(b) == 1 and abs(b[0].state[0] - math.sqrt(2 / 3)) <= 1e-10 and b[0].residual <= 1e-12)
    ea = abs(a[0].state[0] - 1 / math.sqrt(2)) if a else math.nan
    eb = abs(b[0].state[0] - math.sqrt(2 / 3)) if b else math.nan
    summary = f"{len(a)} and {len(b)} fixed points, errors {ea:.1e} and {eb:.1e}, residual {b[0].residual if b else math.nan:.1e}"
    return CheckResult(4, "", ok, summary, {
        "equal": [f.state[0] for f in a], "two_to_one": [f.state[0] for f in b],
        "residuals": [f.residual for f in a + b]})


@_timed(5, "Descartes counts for P at h = 0, 8.5, 10 and P(1) = 48")
def pe_descartes_table(expected=(2, 2, 1)):
    rows = {}
    ok = True
    for h, want in zip((0.0, 8.5, 10.0), expected):
        P = pe_energy_polynomial(1.0, h)
        d = descartes_positive_count(P)
        roots = isolate_real_roots(P, (0.0, math.inf))
        n = sum(r.multiplicity for r in roots)
        p1 = P.exact(Fraction(1))
        rows[h] = {"descartes": d, "numeric": n, "roots": [r.root for r in roots], "P(1)": str(p1)}
        ok &= d == want and n <= d and (d - n) % 2 == 0 and p1 == 48
    summary = "; ".join(f"h={h:g}: D={r['descartes']} N={r['numeric']} P(1)={r['P(1)']}" for h, r in rows.items())
    return CheckResult(5, "", ok, summary, {"rows": rows})


@_timed(6, "Q regimes: no roots in (1,inf) for |h| < sqrt(15), one at |h| = 4, Q(1) = -48")
def ne_regimes(samples=61):
    hs = np.linspace(0.0, math.sqrt(15), samples, endpoint=False)
    counts = {}
    for h in hs:
        Q = ne_energy_polynomial(1.0, float(h))
        counts[float(h)] = sum(r.multiplicity for r in isolate_real_roots(Q, (1.0, math.inf)))
    bad = [h for h, n in counts.items() if n]
    q4 = ne_energy_polynomial(1.0, 4.0)
    at4 = isolate_real_roots(q4, (1.0, math.inf))
    q1 = {h: str(ne_energy_polynomial(1.0, h).exact(Fraction(1))) for h in (0.0, 1.0, 4.0, 8.5)}
    ok = not bad and len(at4) == 1 and all(v == "-48" for v in q1.values())
    onset = None
    if bad:
        # bisect between the last clean sample and the first one with roots
        lo, hi = max(h for h in hs if h < min(bad)), min(bad)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            has = isolate_real_roots(ne_energy_polynomial(1.0, mid), (1.0, math.inf))
            lo, hi = (lo, mid) if has else (mid, hi)
        onset = hi
    summary = (f"{len(bad)}/{len(hs)} sampled |h| < sqrt(15) have roots in (1,inf)"
               + (f" (onset |h| = {onset:.9f}; 5/sqrt(3) = {5 / math.sqrt(3):.9f})" if bad else "")
               + f"; |h|=4: {len(at4)} root; Q(1) = {q1[0.0]}")
    return CheckResult(6, "", ok, summary, {
        "counts": counts, "first_bad": min(bad) if bad else None, "onset": onset,
        "h4_roots": [r.root for r in at4], "Q(1)": q1})


@_timed(7, "NH Eulerian 2-body fixed point (m=1, c=1)")
def nh_two_body_fixed_point(t_end=20.0, tol=1e-9):
    m, c = 1.0, 1.0
    spec = family("2b-ne-simple", m=m, c=c)
    fps = fixed_points(spec)
    x = fps[0].state[0]
    quartic = c**4 * x**4 - m**6 * (x * x + 1)
    derived = c**4 * x**6 - m**6 * (x * x + 1)
    system = FamilySystem(spec)
    tr = simulate_reduced(system, system.initial_state(x, 0.0), IntegratorSettings(t_end=t_end, samples=401))
    stay = float(np.max(np.abs(tr.states[:, 0] - x)) + np.max(np.abs(tr.states[:, 1])))
    full, abort = _run_full(lift_family(spec, (x, 0.0)), IntegratorSettings(t_end=t_end, samples=401))
    full_var = max_pair_variation(full)
    ok = len(fps) == 1 and abs(quartic) <= tol and stay <= tol
    summary = (f"x*={x:.12f}; c^4x^4 - m^6(x^2+1) = {quartic:.3e} (tol {tol:g}); "
               f"c^4x^6 - m^6(x^2+1) = {derived:.1e}; family orbit stays within {stay:.1e}; "
               f"full-system pair drift {full_var:.1e}")
    return CheckResult(7, "", ok, summary, {
        "x_star": x, "quartic_relation": quartic, "sixth_power_relation": derived,
        "family_deviation": stay, "full_system_pair_variation": full_var, "eigenvalues": [str(z) for z in fps[0].eigenvalues]})


def _sys_l_pe_samples(rng, n, avoid=0.05):
    spec = family("sys-L-pe", m=1, c=1)
    centres = [f.state[0] for f in fixed_points(spec)]
    out = []
    while len(out) < n:
        x, v = rng.uniform(-0.9, 0.9), rng.uniform(-0.5, 0.5)
        if min(math.hypot(x - c, v) for c in centres) > avoid:
            out.append((float(x), float(v)))
    return spec, out


def _relative_equilibria():
    return [
        family("Lagrangian-ee", m=1, c1=1, c2=1),
        family("Lagrangian-ee", m=1, c1=2, c2=1),
        family("sys-E-nh", m=1, c=3),
        family("neh-RE", m=1, d1=1, d2=1),
        family("neh-RE", m=1, d1=0.5, d2=1),
    ]


@_timed(8, "confinement: sys-L-pe orbits cross, relative equilibria stay")
def confinement_numerics(seed=0, count=20, t_end=10.0):
    rng = np.random.default_rng(seed)
    spec, starts = _sys_l_pe_samples(rng, count)
    system = FamilySystem(spec)
    settings = IntegratorSettings(t_end=t_end, samples=201)
    crossing = []
    for x, v in starts:
        tr = simulate_reduced(system, system.initial_state(x, v), settings)
        rep = confinement_report(tr)
        crossing.append((x, v, rep.verdict.value, float(np.min(rep.variation))))
    rows_ok = all(vd == Confinement.CrossesContinuum.value and var > 1e-3 for _, _, vd, var in crossing)
    equilibria = {}
    for s in _relative_equilibria():
        sysm = FamilySystem(s)
        for fp in fixed_points(s):
            tr = simulate_reduced(sysm, sysm.initial_state(*fp.state), IntegratorSettings(t_end=20.0, samples=401))
            if classify(tr) is not Verdict.RelativeEquilibrium:
                continue
            rep = confinement_report(tr)
            full, _ = _run_full(lift_family(s, fp.state), IntegratorSettings(t_end=10.0, samples=201))
            equilibria[f"{s.name} {dict(s.params)} x*={fp.state[0]:.6f}"] = {
                "verdict": rep.verdict.value, "variation": rep.max_variation,
                "full_system_variation_t10": confinement_report(full).max_variation}
    eq_ok = bool(equilibria) and all(e["verdict"] == "AllConfined" and e["variation"] <= 1e-8 for e in equilibria.values())
    worst_eq = max((e["variation"] for e in equilibria.values()), default=math.nan)
    summary = (f"{sum(r[2] == 'CrossesContinuum' for r in crossing)}/{len(crossing)} orbits cross "
               f"(min variation {min(r[3] for r in crossing):.2e}); {len(equilibria)} relative equilibria, "
               f"max variation {worst_eq:.1e}")
    return CheckResult(8, "", rows_ok and eq_ok, summary, {"orbits": crossing, "relative_equilibria": equilibria})


@_timed(9, "Lagrangian-ee energy is positive")
def lagrangian_ee_energy(seed=0, count=100):
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(count):
        m = rng.uniform(0.1, 5.0)
        c1, c2 = (rng.uniform(0.05, 5.0) * rng.choice([-1, 1]) for _ in range(2))
        r = rng.uniform(1e-3, 1 - 1e-3)
        u = rng.normal(scale=2.0)
        values.append(energy_on_family(family("Lagrangian-ee", m=m, c1=c1, c2=c2), (r, u)))
    lo = min(values)
    return CheckResult(9, "", lo > 0, f"min energy over {count} states {lo:.4g}", {"min": lo})


@_timed(10, "sys-L-pe return map closes after one period")
def pe_return_map(seed=0, count=12, tol=1e-3):
    rng = np.random.default_rng(seed + 1)
    spec = family("sys-L-pe", m=1, c=1)
    centres = [f.state[0] for f in fixed_points(spec)]
    starts = []
    while len(starts) < count:
        x = float(rng.uniform(-0.97, 0.97))
        # keep off the equilibria and away from the slow orbits near the saddle
        if min(abs(x - c) for c in centres) > 0.05 and abs(x) > 0.1:
            starts.append(x)
    system = FamilySystem(spec)
    settings = IntegratorSettings(t_end=12.0, samples=2401)
    rows = []
    for x in starts:
        tr = simulate_reduced(system, system.initial_state(x, 0.0), settings)
        rm = return_map(tr.times, tr.states[:, 0], tr.states[:, 1])
        rows.append((x, rm.period, rm.distance))
    worst = max((d for _, _, d in rows), default=math.nan)
    ok = all(d < tol for _, _, d in rows)
    return CheckResult(10, "", ok, f"{count} orbits, max return distance {worst:.1e} (tol {tol:g})", {"orbits": rows})


@_timed(11, "neh-RE: rho constant, rotation only in wx and yz")
def neh_re_constancy(t_end=20.0, tol=1e-9):
    rows = {}
    ok = True
    # |d2| <= 1 keeps the boost angle below t_end/3, so rho = sqrt(z^2 - y^2) stays
    # resolvable in ambient coordinates (its rounding error grows like exp(2 * angle))
    for params in ({"d1": 1.0, "d2": 1.0}, {"d1": 0.5, "d2": 1.0}, {"d1": 2.0, "d2": 0.3}):
        spec = family("neh-RE", m=1.0, **params)
        system = FamilySystem(spec)
        for fp in fixed_points(spec):
            tr = simulate_reduced(system, system.initial_state(*fp.state), IntegratorSettings(t_end=t_end, samples=401))
            rho = foliation_radii_series(tr.positions, tr.ambient_space)[:, :, 1]
            var = float(np.max(np.ptp(rho, axis=0)))
            sig = sorted(p for p, on in rotation_signature(tr).items() if on)
            rows[f"{params} x*={fp.state[0]:.6f}"] = {"rho_variation": var, "signature": sig}
            ok &= var <= tol and sig == ["wx", "yz"]
    ok &= bool(rows)
    worst = max((r["rho_variation"] for r in rows.values()), default=math.nan)
    sigs = {tuple(r["signature"]) for r in rows.values()}
    return CheckResult(11, "", ok, f"{len(rows)} equilibria, max rho variation {worst:.1e}, signatures {sorted(sigs)}", {"rows": rows})


CHECKS = (
    conservation_drift,
    lift_consistency,
    pee_lagrangian_equilibrium,
    lagrangian_ee_fixed_points,
    pe_descartes_table,
    ne_regimes,
    nh_two_body_fixed_point,
    confinement_numerics,
    lagrangian_ee_energy,
    pe_return_map,
    neh_re_constancy,
)

_SEEDED = {confinement_numerics, lagrangian_ee_energy, pe_return_map}


def run_check(number: int, seed: int = 0) -> CheckResult:
    fn = CHECKS[number - 1]
    return fn(seed=seed) if fn in _SEEDED else fn()


def run_all(seed: int = 0, numbers=None) -> list:
    return [run_check(k, seed) for k in (numbers or range(1, len(CHECKS) + 1))]
