"""Exception types shared across the package."""


class CurvedNBodyError(Exception):
    """Base class for all errors raised by this package."""


class DegeneratePoint(CurvedNBodyError):
    """A point cannot be projected onto the manifold (zero, null, or lower sheet)."""


class OffManifold(CurvedNBodyError):
    """A point violates the manifold constraint beyond tolerance."""


class Singular(CurvedNBodyError):
    """Two bodies collide (q_ij = sigma) or are antipodal (q_ij = -1 on S^3)."""

    def __init__(self, i, j, qij=None):
        self.i, self.j, self.qij = i, j, qij
        super().__init__(f"singular pair ({i}, {j}), q_ij={qij!r}")


class DegenerateRadius(CurvedNBodyError):
    """A denominator of an angular-velocity law vanishes."""


class UnsupportedClass(CurvedNBodyError):
    """Requested ansatz class has no rotopulsating solutions (parabolic rotations)."""


class DomainExit(CurvedNBodyError):
    """A reduced state left the admissible domain of its system."""

    def __init__(self, t, message="state left the admissible domain"):
        self.t = t
        self.trajectory = None
        super().__init__(f"t={t!r}: {message}")


class SingularityReached(CurvedNBodyError):
    def __init__(self, t, i, j):
        self.t, self.i, self.j = t, i, j
        self.trajectory = None
        super().__init__(f"t={t!r}: singular pair ({i}, {j})")


class StepUnderflow(CurvedNBodyError):
    def __init__(self, t, h):
        self.t, self.h = t, h
        self.trajectory = None
        super().__init__(f"t={t!r}: step size {h!r} below h_min")


class ScenarioError(CurvedNBodyError):
    """Malformed or invalid scenario file."""

    def __init__(self, message, line=None, path=None):
        self.line, self.path = line, path
        loc = f"{path or '<scenario>'}:{line if line is not None else '?'}"
        super().__init__(f"{loc}: {message}")
