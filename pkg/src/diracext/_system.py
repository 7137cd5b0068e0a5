"""Coefficient matrices of the radial 2x2 system of one partial-wave channel.

With kappa = k + lam the radial operator acts as

    h f = J f' + S f / r + m * beta f,      J = [[0, -1], [1, 0]],
    S = [[nu + mu, kappa], [kappa, nu - mu]],  beta = diag(1, -1),

and the eigenvalue equation h f = E f is equivalent to the Fuchsian form

    r f' = (N + r P(E)) f,   N = [[-kappa, mu - nu], [nu + mu, kappa]],
    P(E) = [[0, E + m], [m - E, 0]].

N is the matrix of the near-origin model; its eigenvalues are +-sqrt(delta).
"""

from __future__ import annotations

import numpy as np

from .channels import PotentialParams

J = np.array([[0.0, -1.0], [1.0, 0.0]])
BETA = np.diag([1.0, -1.0])


def kappa(params: PotentialParams, k: int) -> float:
    return k + params.lam


def fuchs_matrix(params: PotentialParams, k: int) -> np.ndarray:
    kap = kappa(params, k)
    return np.array([[-kap, params.mu - params.nu], [params.nu + params.mu, kap]], dtype=float)


def potential_matrix(params: PotentialParams, k: int) -> np.ndarray:
    kap = kappa(params, k)
    return np.array([[params.nu + params.mu, kap], [kap, params.nu - params.mu]], dtype=float)


def coupling_matrix(params: PotentialParams, energy: float) -> np.ndarray:
    m = params.mass
    return np.array([[0.0, energy + m], [m - energy, 0.0]])


def apply_radial_operator(params: PotentialParams, k: int, r, f, df) -> np.ndarray:
    """h f evaluated pointwise from samples of f and f'; arrays of shape (n, 2)."""
    r = np.asarray(r, dtype=float)[:, None]
    f = np.asarray(f)
    df = np.asarray(df)
    S = potential_matrix(params, k)
    out = df @ J.T + (f @ S.T) / r
    out = out + params.mass * (f @ BETA.T)
    return out
