import math

import pytest

from floqspin import BathParams, SystemParams

FIG1 = dict(omega=40.0, h_x=1.0, h_z0=0.0)


@pytest.fixture(scope="session")
def bath():
    """Bath of the reference parameter set: omega_c=10, T=3, gamma=0.01."""
    return BathParams(gamma=0.01, omega_c=10.0, temperature=3.0)


def system(theta=math.pi / 2, h_z1=0.0, omega=40.0, h_x=1.0, h_z0=0.0):
    return SystemParams(omega=omega, theta=theta, h_x=h_x, h_z0=h_z0,
                        h_z1=h_z1)
