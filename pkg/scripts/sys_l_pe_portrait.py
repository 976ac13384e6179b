"""Phase portrait of the sys-L-pe family: orbits, their v=0 return data, and the equilibria.

Writes a CSV of sampled orbits; plots it if matplotlib is available.
"""
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from curved_nbody import IntegratorSettings, simulate_reduced
from curved_nbody.analysis import return_map
from curved_nbody.errors import CurvedNBodyError
from curved_nbody.families import FamilySystem, family, fixed_points


@dataclass
class Config:
    m: float = 1.0
    c: float = 1.0
    x0: list = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9, 0.97])
    t_end: float = 15.0
    samples: int = 1501
    out: Path = Path("out/sys_l_pe_portrait")


def main(cfg: Config = Config()):
    spec = family("sys-L-pe", m=cfg.m, c=cfg.c)
    system = FamilySystem(spec)
    settings = IntegratorSettings(t_end=cfg.t_end, samples=cfg.samples)
    cfg.out.mkdir(parents=True, exist_ok=True)
    orbits = []
    for x0 in cfg.x0:
        try:
            tr = simulate_reduced(system, system.initial_state(x0, 0.0), settings)
        except CurvedNBodyError as exc:
            print(f"x0={x0}: {exc}")
            continue
        rm = return_map(tr.times, tr.states[:, 0], tr.states[:, 1])
        print(f"x0={x0:5.2f}  period={rm.period:8.4f}  return distance={rm.distance:.2e}")
        orbits.append((x0, tr))
    for fp in fixed_points(spec):
        print(f"equilibrium z={fp.state[0]: .10f} ({fp.kind}), energy {fp.energy:.6f}")

    with open(cfg.out / "orbits.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x0", "t", "x", "v"])
        for x0, tr in orbits:
            for t, y in zip(tr.times, tr.states):
                w.writerow([x0, t, y[0], y[1]])
    try:
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, ax = plt.subplots(figsize=(6, 5))
    for x0, tr in orbits:
        ax.plot(tr.states[:, 0], tr.states[:, 1], lw=0.8)
    for fp in fixed_points(spec):
        ax.plot(fp.state[0], 0, "k+" if fp.kind == "saddle" else "ko")
    ax.set_xlabel("z")
    ax.set_ylabel("dz/dt")
    fig.savefig(cfg.out / "portrait.png", dpi=150)


if __name__ == "__main__":
    main()
