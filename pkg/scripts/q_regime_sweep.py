"""Where do roots of the Lagr-ne energy polynomial above 1 appear as |h| grows?"""
import math
from dataclasses import dataclass

import numpy as np

from curved_nbody.analysis import isolate_real_roots
from curved_nbody.families import fixed_points, family, fixed_point_polynomial


@dataclass
class Config:
    m: float = 1.0
    h_max: float = 6.0
    samples: int = 121


def roots_above_one(m, h):
    poly = fixed_point_polynomial(family("Lagr-ne", m=m, h=h))
    return [r.root for r in isolate_real_roots(poly, (1.0, math.inf))]


def main(cfg: Config = Config()):
    first = None
    print(f"{'|h|':>8} {'roots X>1':>10} {'equilibria(-|h|)':>17}")
    for a in np.linspace(0.0, cfg.h_max, cfg.samples):
        rs = roots_above_one(cfg.m, a)
        eq = len(fixed_points(family("Lagr-ne", m=cfg.m, h=-a))) if a > 0 else 0
        if rs and first is None:
            first = a
        print(f"{a:8.3f} {len(rs):10d} {eq:17d}")
    # bisect the onset between grid points
    if first is not None:
        lo, hi = first - cfg.h_max / (cfg.samples - 1), first
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            lo, hi = (lo, mid) if roots_above_one(cfg.m, mid) else (mid, hi)
        print(f"onset |h| = {hi:.6f}  (sqrt(15) m^2 = {math.sqrt(15) * cfg.m**2:.6f})")


if __name__ == "__main__":
    main()
