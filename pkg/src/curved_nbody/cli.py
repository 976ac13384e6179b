"""``curved-nbody`` command line: run, fixed-points, phase-portrait, verify.

Exit codes: 0 success, 1 a verification check failed, 2 a run stopped at a
singularity or left its domain, 3 the scenario is invalid.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    confinement_report,
    descartes_positive_count,
    isolate_real_roots,
    return_map,
    rotation_signature,
)
from .dynamics import INTEGRAL_NAMES, Configuration
from .errors import CurvedNBodyError, DomainExit, ScenarioError, SingularityReached, StepUnderflow
from .families import (
    DEFS,
    FamilySpec,
    FamilySystem,
    eigenvalues,
    fixed_point_polynomial,
    fixed_points,
    pe_energy_polynomial,
    pe_fixed_point_energy,
    pe_fixed_point_momentum,
)
from .integrate import simulate_full, simulate_reduced
from .rotopulse import Ansatz, CriterionSystem, classify, max_pair_variation
from .scenario import Scenario, load_scenario

EXIT_OK, EXIT_CHECK_FAILED, EXIT_ABORT, EXIT_INVALID = 0, 1, 2, 3
_ABORTS = (StepUnderflow, DomainExit, SingularityReached)
THREADS_ENV = "CURVED_NBODY_THREADS"


# ------------------------------------------------------------------ output

def fmt(x) -> str:
    """Shortest decimal that parses back to the same double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return None if not math.isfinite(obj) else float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: Path, obj):
    path.write_text(json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n")


def trajectory_header(n: int) -> list:
    cols = ["t"]
    for i in range(n):
        cols += [f"{c}{i}" for c in ("w", "x", "y", "z")]
        cols += [f"d{c}{i}" for c in ("w", "x", "y", "z")]
    return cols + list(INTEGRAL_NAMES)


def write_trajectory_csv(path: Path, trajectory):
    P, V = trajectory.positions, trajectory.velocities
    table = trajectory.integral_table()
    n = P.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trajectory_header(n))
        for k, t in enumerate(trajectory.times):
            row = [fmt(t)]
            for i in range(n):
                row += [fmt(v) for v in P[k, i]] + [fmt(v) for v in V[k, i]]
            w.writerow(row + [fmt(v) for v in table[k]])


def read_trajectory_csv(path) -> tuple:
    """``(times, positions, velocities, integrals)`` from a trajectory CSV."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
    n = (len(header) - 1 - len(INTEGRAL_NAMES)) // 8
    body = data[:, 1 : 1 + 8 * n].reshape(len(data), n, 8)
    return data[:, 0], body[:, :, :4], body[:, :, 4:], data[:, 1 + 8 * n :]


def configuration_from_csv(path, space, masses, row: int = 0) -> Configuration:
    _, P, V, _ = read_trajectory_csv(path)
    return Configuration(space, masses, P[row], V[row])


# ------------------------------------------------------------------ run

def _build(scn: Scenario):
    """The system to integrate and its initial state; ``system`` is None for ambient runs."""
    if scn.full is not None:
        f = scn.full
        return None, Configuration(f.space, f.masses, f.positions, f.velocities)
    if scn.ansatz is not None:
        a = scn.ansatz
        ansatz = Ansatz(a.kind, a.masses, a.constants, a=a.a, b=a.b)
        system = CriterionSystem(ansatz)
        state = np.array(a.state, dtype=float)
        if len(state) != system.dim:
            raise ValueError(f"[ansatz].state needs {system.dim} entries for this class, got {len(state)}")
    else:
        system = FamilySystem(scn.family.spec)
        state = system.initial_state(*scn.family.state)
    if scn.mode == "full":
        return None, system.lift(state)
    return system, state


def run_scenario(scn: Scenario, out: Path) -> int:
    try:
        system, init = _build(scn)
    except (ValueError, CurvedNBodyError) as exc:
        print(f"{scn.path}: invalid initial data: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out.mkdir(parents=True, exist_ok=True)
    abort = None
    try:
        tr = simulate_full(init, scn.settings) if system is None else simulate_reduced(system, init, scn.settings)
    except _ABORTS as exc:
        abort, tr = exc, exc.trajectory
    write_trajectory_csv(out / "trajectory.csv", tr)
    write_json(out / "drift.json", tr.drift())
    summary = {"scenario": scn.name, "space": tr.ambient_space.name, "masses": list(map(float, tr.masses if tr.is_full else tr.system.masses)),
               "mode": "full" if tr.is_full else "reduced", "t_end": float(tr.times[-1]), "samples": len(tr)}
    if abort is not None:
        summary["abort"] = {"type": type(abort).__name__, "message": str(abort)}
    if len(tr) >= 16:
        rep = confinement_report(tr)
        summary.update(
            verdict=classify(tr).value,
            max_pair_variation=max_pair_variation(tr),
            confinement={"verdict": rep.verdict.value, "variation": list(rep.variation), "worst_body": rep.worst_body, "tol": rep.tol},
            rotation_signature=rotation_signature(tr),
        )
    write_json(out / "summary.json", summary)
    print(f"{scn.name}: {summary.get('verdict', 'too few samples')}, t_end={summary['t_end']:g}"
          + (f", aborted ({type(abort).__name__})" if abort else ""))
    return EXIT_ABORT if abort is not None else EXIT_OK


# ------------------------------------------------------------------ fixed points

def _workers(n_items: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            pass
    return max(1, min(limit, n_items))


def _map(fn, items):
    items = list(items)
    workers = _workers(len(items))
    if workers == 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _grid_points(scn: Scenario) -> list:
    names = list(scn.grid)
    out = []
    for combo in itertools.product(*(scn.grid[k] for k in names)):
        p = dict(scn.fixed)
        p.update(zip(names, combo))
        out.append(p)
    return out


def _eig_cols(lam):
    lam = list(lam) + [complex("nan")] * (2 - len(lam))
    return [lam[0].real, lam[0].imag, lam[1].real, lam[1].imag]


def _pe_energy_rows(params, shape):
    """sys-L-pe at fixed energy: equilibria are roots z of P; c follows from z."""
    m, h = params["m"], params["h"]
    P = pe_energy_polynomial(m, h)
    desc = descartes_positive_count(P)
    roots = isolate_real_roots(P, (0.0, 1.0))
    count = sum(r.multiplicity for r in roots)
    rows = []
    for r in roots:
        z = r.root
        c = pe_fixed_point_momentum(m, z)
        lam = eigenvalues(FamilySpec("sys-L-pe", {"m": m, "c": c}, shape=shape), (z, 0.0)) if c > 0 else ()
        rows.append({"root": z, "multiplicity": r.multiplicity, "residual": abs(P(z)), "energy": pe_fixed_point_energy(m, z),
                     "c": c, "eig": _eig_cols(lam), "kind": ""})
    return "P(z)", desc, count, rows


def _fixed_point_rows(item):
    name, params, shape = item
    if name == "sys-L-pe" and "h" in params and "c" not in params:
        return _pe_energy_rows(params, shape)
    spec = FamilySpec(name, params, shape=shape)
    poly = fixed_point_polynomial(spec)
    desc = descartes_positive_count(poly) if not poly.is_zero() else 0
    count = sum(r.multiplicity for r in isolate_real_roots(poly, spec.definition.fp_range)) if not poly.is_zero() else 0
    rows = [{"root": f.state[0], "multiplicity": 1, "residual": f.residual, "energy": f.energy, "c": math.nan,
             "eig": _eig_cols(f.eigenvalues), "kind": f.kind} for f in fixed_points(spec)]
    return "fixed-point(X)", desc, count, rows


def fixed_points_table(scn: Scenario, out: Path) -> int:
    points = _grid_points(scn)
    name = scn.family_name
    for p in points:
        # validate before fanning out so the error names the scenario
        probe = dict(p)
        if name == "sys-L-pe" and "h" in probe and "c" not in probe:
            if set(probe) != {"m", "h"}:
                raise ScenarioError(f"sys-L-pe at fixed energy takes m and h, got {sorted(probe)}", None, scn.path)
            continue
        try:
            FamilySpec(name, probe, shape=scn.shape)
        except ValueError as exc:
            raise ScenarioError(str(exc), None, scn.path) from exc
    results = _map(_fixed_point_rows, [(name, p, scn.shape) for p in points])
    pnames = sorted({k for p in points for k in p}, key=lambda k: (DEFS[name].params + ("h",)).index(k))
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "fixed_points.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family"] + pnames + ["polynomial", "descartes", "numeric_count", "index", "root", "multiplicity",
                                         "residual", "energy", "c", "eig0_re", "eig0_im", "eig1_re", "eig1_im", "kind"])
        for p, (poly, desc, count, rows) in zip(points, results):
            head = [name] + [fmt(p[k]) for k in pnames] + [poly, desc, count]
            if not rows:
                w.writerow(head + [""] * 11)
            for k, r in enumerate(rows):
                w.writerow(head + [k, fmt(r["root"]), r["multiplicity"], fmt(r["residual"]), fmt(r["energy"]), fmt(r["c"])]
                           + [fmt(v) for v in r["eig"]] + [r["kind"]])
    print(f"{scn.name}: {len(points)} parameter points, {sum(len(r[3]) for r in results)} roots")
    return EXIT_OK


# ------------------------------------------------------------------ phase portrait

def _orbit(item):
    spec, state, settings = item
    system = FamilySystem(spec)
    y0 = system.initial_state(*state)
    flag = "ok"
    try:
        tr = simulate_reduced(system, y0, settings)
    except _ABORTS as exc:
        tr, flag = exc.trajectory, type(exc).__name__
    rm = return_map(tr.times, tr.states[:, 0], tr.states[:, 1]) if len(tr) > 1 else None
    return tr.times, tr.states, flag, (rm.period, rm.distance) if rm else (math.nan, math.nan)


def phase_portrait(scn: Scenario, out: Path) -> int:
    spec = scn.family.spec
    n_angles = FamilySystem(spec).n_angles
    cols = ["row", "orbit", "flag", "t", "x", "v"] + ["alpha", "beta"][:n_angles]
    out.mkdir(parents=True, exist_ok=True)
    summaries = []
    results = _map(_orbit, [(spec, s, scn.settings) for s in scn.initial])
    with open(out / "phase_portrait.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for k, (times, states, flag, (period, dist)) in enumerate(results):
            for t, y in zip(times, states):
                w.writerow(["orbit", k, flag, fmt(t)] + [fmt(v) for v in y])
            summaries.append({"orbit": k, "initial": list(scn.initial[k]), "flag": flag, "t_reached": float(times[-1]) if len(times) else 0.0,
                              "period": period, "return_distance": dist})
        if scn.initial:
            for fp in fixed_points(spec):
                w.writerow([f"fixed_point:{fp.kind}", "", "", ""] + [fmt(fp.state[0]), fmt(fp.state[1])] + [""] * n_angles)
    write_json(out / "orbits.json", summaries)
    print(f"{scn.name}: {len(results)} orbits, {sum(s['flag'] != 'ok' for s in summaries)} truncated")
    return EXIT_OK


# ------------------------------------------------------------------ verify

def verify(out, seed: int, only=None) -> int:
    from .verification import run_all

    results = run_all(seed=seed, numbers=only)
    for r in results:
        print(r.line(), flush=True)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "verification.json", [
            {"number": r.number, "title": r.title, "passed": r.passed, "summary": r.summary, "seconds": r.seconds, "details": r.details}
            for r in results])
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return EXIT_OK if passed == len(results) else EXIT_CHECK_FAILED


# ------------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curved-nbody", description="Curved N-body simulations and analyses.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("run", "integrate one scenario"),
                           ("fixed-points", "tabulate fixed points over a parameter grid"),
                           ("phase-portrait", "integrate a grid of family orbits")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--scenario", required=True, type=Path)
        p.add_argument("--out", type=Path)
        p.add_argument("--tol", type=float, help="override the relative tolerance")
        p.add_argument("--t-end", type=float, help="override the final time")
        p.add_argument("--seed", type=int, default=0, help="unused by deterministic runs; accepted for uniformity")
    p = sub.add_parser("verify", help="re-run the numerical acceptance checks")
    p.add_argument("--out", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", type=int, nargs="*", help="check numbers to run (default all)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return verify(args.out, args.seed, args.only)
    overrides = {"rel_tol": args.tol, "t_end": args.t_end}
    try:
        scn = load_scenario(args.scenario, overrides)
        expected = {"run": "run", "fixed-points": "fixed-points", "phase-portrait": "phase-portrait"}[args.command]
        if scn.kind != expected:
            raise ScenarioError(f"scenario kind is '{scn.kind}', not '{expected}'", None, scn.path)
        out = args.out or Path(scn.output_dir or f"out/{scn.name}")
        if args.command == "run":
            return run_scenario(scn, out)
        if args.command == "fixed-points":
            return fixed_points_table(scn, out)
        return phase_portrait(scn, out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
