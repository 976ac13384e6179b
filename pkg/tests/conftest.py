import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from curved_nbody import H3, S3

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
vec4 = st.tuples(finite, finite, finite, finite).map(np.array)
spaces = st.sampled_from([S3, H3])


def random_point(rng, space):
    """A point of the space: uniform-ish on S3, moderate height on H3."""
    if space.sigma == 1:
        p = rng.normal(size=4)
        return p / np.linalg.norm(p)
    w, x, y = rng.normal(scale=0.8, size=3)
    return np.array([w, x, y, np.sqrt(1 + w * w + x * x + y * y)])


def random_tangent(rng, space, p, scale=0.5):
    v = rng.normal(scale=scale, size=4)
    s = space.sigma
    pp = p[0] ** 2 + p[1] ** 2 + p[2] ** 2 + s * p[3] ** 2
    pv = p[0] * v[0] + p[1] * v[1] + p[2] * v[2] + s * p[3] * v[3]
    return v - pv / pp * p


def random_configuration(rng, space, n, min_gap=0.2):
    """Masses, positions and velocities with pairwise separation bounded away from collisions."""
    from curved_nbody.dynamics import Configuration, gram

    while True:
        Q = np.array([random_point(rng, space) for _ in range(n)])
        G = gram(space, Q)
        iu = np.triu_indices(n, 1)
        q = G[iu]
        gap = np.min(1 - q * q) if space.sigma == 1 else np.min(q * q - 1)
        if gap > min_gap:
            break
    V = np.array([random_tangent(rng, space, p) for p in Q])
    m = rng.uniform(0.5, 2.0, size=n)
    return Configuration(space, m, Q, V)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
