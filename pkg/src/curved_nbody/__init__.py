"""N-body dynamics on the unit 3-sphere and the hyperbolic 3-space."""
from .manifold import H3, S3, Space
from .dynamics import Configuration, Integrals, integrals
from .integrate import IntegratorSettings, Trajectory, simulate_full, simulate_reduced
from .rotopulse import Ansatz, CriterionSystem, Kind, Verdict, classify, lift

__all__ = [
    "H3", "S3", "Space", "Configuration", "Integrals", "integrals",
    "IntegratorSettings", "Trajectory", "simulate_full", "simulate_reduced",
    "Ansatz", "CriterionSystem", "Kind", "Verdict", "classify", "lift",
]
__version__ = "0.1.0"
