import numpy as np
import pytest

from symcone import (
    IntegrableDomain,
    PlanarWellSystem,
    SupportMeta,
    build_smoothed_well,
    hamiltonian_from_expression,
    sandwich_solve,
)


@pytest.fixture(scope="session")
def well3():
    """The C=3, eps=0.25 double-well profile used across the suite."""
    return build_smoothed_well(C=3.0, eps=0.25)


@pytest.fixture(scope="session")
def planar3(well3):
    return PlanarWellSystem(a=1.0, b=1.0, well=well3)


@pytest.fixture(scope="session")
def domain3(well3):
    return IntegrableDomain(n=2, k=1, a=1.0, b=1.0, well=well3)


@pytest.fixture(scope="session")
def worked_hamiltonian():
    """The plateau bump with the worked support constants."""
    return hamiltonian_from_expression(
        "1 * bump(rho; 1, 3)", n=2, k=1,
        meta=SupportMeta(M=1.0, m=0.5, rho0=0.1, rho1=3.0))


@pytest.fixture(scope="session")
def worked_certificate(worked_hamiltonian):
    return sandwich_solve(worked_hamiltonian)


def sphere(rng, count, dim):
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
