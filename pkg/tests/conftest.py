import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def admissible_params(rng, n, mass=1.0):
    """Random (nu, mu, lam) with |nu| + sqrt(mu^2 + lam^2) <= 1."""
    from diracext.channels import PotentialParams

    out = []
    for _ in range(n):
        s = rng.uniform(0.0, 1.0)
        nu = rng.choice([-1, 1]) * rng.uniform(0, s)
        rho = s - abs(nu)
        phi = rng.uniform(0, 2 * np.pi)
        out.append(PotentialParams(float(nu), float(rho * np.cos(phi)), float(rho * np.sin(phi)), mass))
    return out
