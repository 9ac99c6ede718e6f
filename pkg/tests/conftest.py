import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from revradon.geometry import Cone, Lemon, MuSpec, Sphere, Spheroid
from revradon.operators import ScanGrid, Volume

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# pass/fail lines collected by tests/test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE, key=lambda l: int(l.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


PROFILES = {
    "sphere": Sphere(),
    "spheroid": Spheroid(2.0),
    "lemon": Lemon(2.0),
    "cone": Cone(),
}

MUS = {
    "sphere": MuSpec("sphere"),
    "spheroid": MuSpec("spheroid", c=2.0),
    "lemon": MuSpec("lemon", alpha=2.0),
}


def bump(grid, center=(0.15, -0.1, 0.3), radius=0.45, height=1.2):
    """Smooth compactly supported bump ``(1 - q)**3`` on an ellipsoid."""
    X, Y, Z = np.meshgrid(grid.x, grid.x, grid.z, indexing="ij")
    q = ((X - center[0]) ** 2 + (Y - center[1]) ** 2) / radius**2 + ((Z - center[2]) / height) ** 2
    return Volume(np.where(q < 1, (1 - q) ** 3, 0.0), grid.extent)


@pytest.fixture
def small_grid():
    return ScanGrid(n=17, n_theta=16)


@pytest.fixture
def grid33():
    return ScanGrid(n=33, n_theta=64)
