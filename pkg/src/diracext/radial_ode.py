"""Shooting solver for h f = E f on one channel, E in the gap (-m, m).

The outward solution starts from the convergent local expansion at a small
radius r_s and is integrated in t = log r up to the matching radius r_m; the
inward solution starts from the one-term WKB form of the decaying solution at
r_inf and is integrated down to r_m.  Eigenvalues are zeros of the normalized
2x2 matching determinant.  Many energies are integrated in one vectorized
system during the bracketing scan.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import frobenius
from ._system import BETA, J, coupling_matrix, fuchs_matrix, kappa, potential_matrix
from .boundary import (
    BoundaryData,
    boundary_matrix,
    coeffs_from_boundary,
    connection_matrix,
    extract_boundary_data,
    solution_basis,
)
from .channels import PotentialParams, Regime, classify_channel
from .errors import (
    DegenerateRelation,
    EnergyOutsideGap,
    EssentiallySelfAdjointChannel,
    InvalidParameters,
    MatchingIllConditioned,
    NonConvergent,
)
from .quadrature import gauss_panels

#: scan stays this fraction of m away from the gap edges
EDGE_MARGIN = 1e-3
#: r_inf - r_m in units of the decay length 1 / sqrt(m^2 - E^2)
DECAY_LENGTHS = 20.0
SCAN_POINTS = 400
PANELS_PER_DECADE = 6
GAUSS_ORDER = 8
DEFAULT_R0 = 1e-8
ROW_TOL = 1e-12


@dataclass(frozen=True)
class Tolerances:
    abs_tol: float = 1e-14
    rel_tol: float = 1e-11

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidParameters("tolerances must be positive")

    def tighter(self, factor: float = 100.0) -> "Tolerances":
        return Tolerances(self.abs_tol / factor, max(self.rel_tol / factor, 3e-14))

    def to_dict(self) -> dict:
        return {"abs_tol": self.abs_tol, "rel_tol": self.rel_tol}


def radial_rhs(params: PotentialParams, k: int, energy: float, r: float, state) -> np.ndarray:
    """(f+', f-') of the eigenvalue system at radius r."""
    f = np.asarray(state)
    kap = kappa(params, k)
    m, nu, mu = params.mass, params.nu, params.mu
    fp = -(kap / r) * f[0] + (energy + m - (nu - mu) / r) * f[1]
    fm = (kap / r) * f[1] - (energy - m - (nu + mu) / r) * f[0]
    return np.array([fp, fm])


def matching_radius(params: PotentialParams) -> float:
    return max(1.0, 1.0 / params.mass) if params.mass > 0 else 1.0


def _start_radius(params: PotentialParams, r_m: float) -> float:
    return min(0.05 / max(params.mass, 1e-300), 0.1 * r_m)


def relation_ray(relation_row) -> np.ndarray:
    """(G+, G-) = (b, a): a nonzero solution of a G+ = b G-."""
    a, b = complex(relation_row[0]), complex(relation_row[1])
    if a == 0 and b == 0:
        raise DegenerateRelation("relation row (0, 0) does not define a boundary condition")
    if abs((a * b.conjugate()).imag) > ROW_TOL * (abs(a) ** 2 + abs(b) ** 2):
        raise InvalidParameters(f"row ({a}, {b}) is not self-adjoint: a conj(b) must be real")
    return np.array([b, a], dtype=complex)


def _recessive_vector(params: PotentialParams, k: int, gamma: float) -> np.ndarray:
    kap, nu, mu = kappa(params, k), params.nu, params.mu
    v1 = np.array([mu - nu, kap + gamma])
    v2 = np.array([kap - gamma, -(nu + mu)])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    return (v / np.linalg.norm(v)).astype(complex)


class LocalData(NamedTuple):
    """Leading coefficients of the outward solution near the origin."""

    regime: Regime
    coeffs: np.ndarray  # (A+, A-) or the single recessive coefficient
    exponents: tuple  # exponents of the columns
    columns: np.ndarray  # (2, n) leading vectors


def _local_data(params: PotentialParams, k: int, relation_row) -> LocalData:
    cls = classify_channel(params, k)
    if cls.regime is Regime.ESSENTIALLY_SELF_ADJOINT:
        if relation_row is not None:
            raise EssentiallySelfAdjointChannel(
                f"channel k={k} is essentially self-adjoint (delta={cls.delta:.6g}); it takes no relation row"
            )
        v = _recessive_vector(params, k, cls.gamma)
        return LocalData(cls.regime, np.array([1.0 + 0j]), (cls.gamma,), v[:, None])
    if relation_row is None:
        raise DegenerateRelation(f"channel k={k} ({cls.regime.value}) needs a relation row")
    conn = connection_matrix(params, k)
    coeffs = coeffs_from_boundary(params, k, relation_ray(relation_row))
    if cls.regime is Regime.CRITICAL:
        return LocalData(cls.regime, coeffs, (0.0, 0.0), np.eye(2, dtype=complex))
    g = cls.gamma
    exps = (g, -g) if cls.regime is Regime.SUBCRITICAL else (1j * g, -1j * g)
    return LocalData(cls.regime, coeffs, exps, conn.entries)


def _local_values(params, k, local: LocalData, r, energy=None) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if local.regime is Regime.ESSENTIALLY_SELF_ADJOINT:
        P = coupling_matrix(params, 0.0 if energy is None else energy)
        order = 0 if energy is None else None
        col = frobenius.power_series(fuchs_matrix(params, k), P, local.exponents[0], local.columns[:, 0], r, order=order)
        return col * local.coeffs[0]
    return solution_basis(params, k, r, energy) @ local.coeffs


def small_r_initial_data(params: PotentialParams, k: int, relation_row, r0: float, energy: float | None = None) -> np.ndarray:
    """Value at r0 of the solution whose boundary data is the ray of ``relation_row``.

    Leading-order model by default; with ``energy`` the exact local solution.
    """
    local = _local_data(params, k, relation_row)
    return _local_values(params, k, local, r0, energy)[0]


def recessive_initial_data(params: PotentialParams, k: int, r0: float, energy: float | None = None) -> np.ndarray:
    """Value at r0 of the r^{+gamma} solution of an essentially self-adjoint channel."""
    local = _local_data(params, k, None)
    return _local_values(params, k, local, r0, energy)[0]


class DecayingData(NamedTuple):
    r_inf: float
    value: np.ndarray  # unit direction of f(r_inf)
    kappa: float
    sigma: float
    log_amplitude: float  # log |f(r_inf)| for f ~ r^sigma exp(-kappa r) value


def decay_rate(params: PotentialParams, energy: float) -> float:
    m = params.mass
    if not abs(energy) < m:
        raise EnergyOutsideGap(f"E={energy!r} is outside the gap (-{m}, {m})")
    return math.sqrt((m - energy) * (m + energy))


def auto_r_inf(params: PotentialParams, energy: float) -> float:
    return matching_radius(params) + DECAY_LENGTHS / decay_rate(params, energy)


def large_r_decaying_data(params: PotentialParams, k: int, energy: float, r_inf: float | None = None) -> DecayingData:
    """One-term Liouville-Green data of the L^2 solution at r_inf.

    f(r) ~ r^sigma exp(-kappa r) (sqrt(m + E), -sqrt(m - E)) with
    kappa = sqrt(m^2 - E^2) and sigma = -(mu m + nu E) / kappa.
    """
    m = params.mass
    kap_d = decay_rate(params, energy)
    if r_inf is None:
        r_inf = auto_r_inf(params, energy)
    vec = np.array([math.sqrt(m + energy), -math.sqrt(m - energy)])
    norm = float(np.linalg.norm(vec))
    sigma = -(params.mu * m + params.nu * energy) / kap_d
    log_amp = sigma * math.log(r_inf) - kap_d * r_inf + math.log(norm)
    return DecayingData(float(r_inf), (vec / norm).astype(complex), kap_d, sigma, log_amp)


# -- vectorized integrators -------------------------------------------------


def _outward(params, k, local, energies, r_s, r_m, tol: Tolerances, t_eval=None):
    """Integrate from r_s to r_m in t = log r for all energies at once.

    Returns the state at r_m, shape (n, 2), plus the solve result.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    n = energies.size
    y0 = np.array([_local_values(params, k, local, r_s, e)[0] for e in energies])
    # constant phase from the energy independent model keeps real solutions real
    lead = _local_values(params, k, local, r_s)[0]
    phase = np.exp(-0.5j * np.angle(np.sum(lead * lead)))
    y0 = y0 * phase
    scale = np.linalg.norm(y0, axis=1)
    y0 = y0 / scale[:, None]
    N = fuchs_matrix(params, k)
    m = params.mass
    ep, em = energies + m, m - energies

    def rhs(t, y):
        y = y.reshape(n, 2)
        r = math.exp(t)
        d0 = N[0, 0] * y[:, 0] + N[0, 1] * y[:, 1] + r * ep * y[:, 1]
        d1 = N[1, 0] * y[:, 0] + N[1, 1] * y[:, 1] + r * em * y[:, 0]
        return np.stack([d0, d1], axis=1).ravel()

    sol = solve_ivp(
        rhs,
        (math.log(r_s), math.log(r_m)),
        y0.ravel(),
        method="DOP853",
        rtol=tol.rel_tol,
        atol=tol.abs_tol,
        t_eval=t_eval,
    )
    if not sol.success:
        raise NonConvergent(f"outward integration failed: {sol.message}")
    return sol.y[:, -1].reshape(n, 2), sol, phase / scale


def _inward(params, k, energies, r_m, tol: Tolerances, r_infs=None, r_eval=None):
    """Integrate the decaying solutions from r_inf(E) down to r_m, using
    r = r_m + s (r_inf - r_m) so all energies share s in [1, 0]."""
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    n = energies.size
    if r_infs is None:
        r_infs = np.array([auto_r_inf(params, e) for e in energies])
    data = [large_r_decaying_data(params, k, e, ri) for e, ri in zip(energies, r_infs)]
    y0 = np.array([d.value for d in data])
    span = np.asarray(r_infs) - r_m
    N = fuchs_matrix(params, k)
    m = params.mass
    ep, em = energies + m, m - energies

    def rhs(s, y):
        y = y.reshape(n, 2)
        r = r_m + s * span
        d0 = N[0, 0] * y[:, 0] / r + N[0, 1] * y[:, 1] / r + ep * y[:, 1]
        d1 = N[1, 0] * y[:, 0] / r + N[1, 1] * y[:, 1] / r + em * y[:, 0]
        return (np.stack([d0, d1], axis=1) * span[:, None]).ravel()

    s_eval = None
    if r_eval is not None:
        s_eval = (np.asarray(r_eval) - r_m) / span[0]
    sol = solve_ivp(rhs, (1.0, 0.0), y0.ravel(), method="DOP853", rtol=tol.rel_tol, atol=tol.abs_tol, t_eval=s_eval)
    if not sol.success:
        raise NonConvergent(f"inward integration failed: {sol.message}")
    return sol.y[:, -1].reshape(n, 2), sol, data


@dataclass(frozen=True)
class Trajectory:
    """Unnormalized samples of one solution (duck-types as extraction input)."""

    k: int
    energy: float
    grid: np.ndarray
    values: np.ndarray


def integrate_outward(params: PotentialParams, k: int, relation_row, energy: float, r_eval, tol: Tolerances | None = None) -> Trajectory:
    """Solution with boundary ray ``relation_row`` (None: the regular one),
    sampled at increasing radii ``r_eval``; series values below the start radius."""
    tol = tol or Tolerances()
    local = _local_data(params, k, relation_row)
    r = np.asarray(r_eval, dtype=float)
    r_s = _start_radius(params, float(r.max()) * 10.0)
    below = r < r_s
    vals = np.empty((r.size, 2), dtype=complex)
    _, sol, factor = _outward(params, k, local, [energy], r_s, float(r.max()), tol, t_eval=np.log(r[~below]))
    if np.any(below):
        vals[below] = _local_values(params, k, local, r[below], energy) * factor[0]
    vals[~below] = sol.y.T
    return Trajectory(int(k), float(energy), r, vals)


def integrate_inward(params: PotentialParams, k: int, energy: float, r_eval, r_inf: float | None = None, tol: Tolerances | None = None) -> Trajectory:
    """Decaying solution sampled at increasing radii ``r_eval`` < r_inf."""
    tol = tol or Tolerances()
    r = np.asarray(r_eval, dtype=float)
    r_lo = float(r.min())
    r_inf = auto_r_inf(params, energy) if r_inf is None else r_inf
    if not r.max() <= r_inf:
        raise InvalidParameters("evaluation radii must not exceed r_inf")
    _, sol, _ = _inward(params, k, [energy], r_lo, tol, r_infs=[r_inf], r_eval=r[::-1])
    return Trajectory(int(k), float(energy), r, sol.y.T[::-1])


def _match(u, w) -> np.ndarray:
    nu_, nw = np.linalg.norm(u, axis=1), np.linalg.norm(w, axis=1)
    bad = ~np.isfinite(nu_ * nw) | (nu_ * nw == 0)
    if np.any(bad):
        raise MatchingIllConditioned("outward or inward solution vanished or overflowed at the matching radius")
    det = (u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]) / (nu_ * nw)
    return det.real


class ChannelShooter:
    """Matching determinant of one channel under a fixed relation row."""

    def __init__(self, params: PotentialParams, k: int, relation_row=None, tol: Tolerances | None = None):
        if not params.mass > 0:
            raise InvalidParameters("the gap (-m, m) is empty: mass must be positive")
        self.params = params
        self.k = int(k)
        self.relation_row = None if relation_row is None else (complex(relation_row[0]), complex(relation_row[1]))
        self.local = _local_data(params, k, relation_row)
        self.tol = tol or Tolerances()
        self.r_m = matching_radius(params)
        self.r_s = _start_radius(params, self.r_m)

    def determinant(self, energies, tol: Tolerances | None = None) -> np.ndarray:
        tol = tol or self.tol
        u, _, _ = _outward(self.params, self.k, self.local, energies, self.r_s, self.r_m, tol)
        w, _, _ = _inward(self.params, self.k, energies, self.r_m, tol)
        return _match(u, w)

    def __call__(self, energy: float) -> float:
        return float(self.determinant([energy])[0])


# -- eigenfunctions ---------------------------------------------------------


@dataclass
class RadialSolution:
    """Samples of a radial solution on a composite Gauss-Legendre grid.

    ``weights`` integrate over the grid span; ``tail`` is the leading-order
    value of the integral of |f|^2 over (0, grid[0]) and is included in
    ``norm_sq``.
    """

    k: int
    energy: float
    grid: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    tolerances: Tolerances = field(default_factory=Tolerances)
    norm_sq: float = 0.0
    tail: float = 0.0
    local: LocalData | None = None
    local_scale: complex = 1.0

    def inner(self, other: "RadialSolution", params: PotentialParams | None = None) -> complex:
        if not np.array_equal(self.grid, other.grid):
            raise ValueError("solutions live on different grids")
        val = np.sum(self.weights * np.sum(self.values * np.conj(other.values), axis=1))
        if params is not None and self.local is not None and other.local is not None:
            val += _tail_inner(params, self.k, self, other, float(self.grid[0]))
        return complex(val)

    def residual(self, params: PotentialParams) -> float:
        """Max relative defect |h f - E f| at interior nodes, with f'
        taken from a cubic spline in log r."""
        t = np.log(self.grid)
        spline = CubicSpline(t, self.values, axis=0)
        r = self.grid[:, None]
        rdf = spline(t, 1)
        S = potential_matrix(params, self.k)
        hf_r = rdf @ J.T + self.values @ S.T + r * params.mass * (self.values @ BETA.T) - r * self.energy * self.values
        scale = np.abs(self.values) @ np.abs(S).T + r * (params.mass + abs(self.energy)) * np.abs(self.values) + np.abs(rdf)
        defect = np.linalg.norm(hf_r, axis=1) / np.maximum(np.linalg.norm(scale, axis=1), 1e-300)
        interior = slice(GAUSS_ORDER, -GAUSS_ORDER)
        return float(defect[interior].max())

    def to_csv(self, fh=None) -> str | None:
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["r", "re_fp", "im_fp", "re_fm", "im_fm"])
        for r, (fp, fm) in zip(self.grid, self.values):
            w.writerow([repr(float(r)), repr(fp.real), repr(fp.imag), repr(fm.real), repr(fm.imag)])
        return out.getvalue() if fh is None else None


def _tail_inner(params, k, f: RadialSolution, g: RadialSolution, r0: float) -> complex:
    """Leading-order value of int_0^r0 f . conj(g) dr."""
    lf, lg = f.local, g.local
    af = lf.coeffs * f.local_scale
    ag = lg.coeffs * g.local_scale
    if lf.regime is Regime.CRITICAL:
        M = fuchs_matrix(params, k)
        a1, b1 = af, M @ af
        a2, b2 = ag, M @ ag
        L = math.log(r0)
        i0, i1, i2 = r0, r0 * (L - 1.0), r0 * (L * L - 2.0 * L + 2.0)
        return complex(np.vdot(a2, a1) * i0 + (np.vdot(b2, a1) + np.vdot(a2, b1)) * i1 + np.vdot(b2, b1) * i2)
    total = 0j
    for i, si in enumerate(lf.exponents):
        ci = lf.columns[:, i] * af[i]
        for j, sj in enumerate(lg.exponents):
            cj = lg.columns[:, j] * ag[j]
            e = si + np.conj(sj) + 1.0
            total += np.vdot(cj, ci) * r0**e / e
    return complex(total)


def _grid(r0: float, r_m: float, r_far: float, mass: float):
    decades = math.log10(r_m / r0)
    inner_edges = np.geomspace(r0, r_m, max(2, int(math.ceil(PANELS_PER_DECADE * decades))) + 1)
    width = 1.0 / max(mass, 1.0)
    outer_edges = np.linspace(r_m, r_far, max(2, int(math.ceil((r_far - r_m) / width))) + 1)
    x1, w1 = gauss_panels(inner_edges, GAUSS_ORDER)
    x2, w2 = gauss_panels(outer_edges, GAUSS_ORDER)
    return np.concatenate([x1, x2]), np.concatenate([w1, w2]), x1.size


def eigenfunction(shooter: ChannelShooter, energy: float, r0: float = DEFAULT_R0, r_far: float | None = None) -> RadialSolution:
    """Assemble and normalize the solution at ``energy`` (assumed an eigenvalue)."""
    p, k, tol = shooter.params, shooter.k, shooter.tol
    r_inf = auto_r_inf(p, energy)
    r_far = max(r_inf, r_far or 0.0)
    if not r0 < shooter.r_m:
        raise InvalidParameters(f"r0={r0} must lie below the matching radius {shooter.r_m}")
    grid, weights, n_in = _grid(r0, shooter.r_m, r_far, p.mass)
    values = np.empty((grid.size, 2), dtype=complex)
    inner = grid[:n_in]
    below = inner < shooter.r_s
    above_t = np.log(inner[~below])
    u_end, sol_out, factor = _outward(p, k, shooter.local, [energy], shooter.r_s, shooter.r_m, tol, t_eval=np.append(above_t, math.log(shooter.r_m)))
    u_end = u_end[0]
    # series values carry the same phase and normalization as the ODE start
    local_scale = complex(factor[0])
    values[:n_in][below] = _local_values(p, k, shooter.local, inner[below], energy) * local_scale
    values[:n_in][~below] = sol_out.y[:, :-1].T
    outer = grid[n_in:]
    inside = outer <= r_inf
    w_end, sol_in, data = _inward(p, k, [energy], shooter.r_m, tol, r_infs=[r_inf], r_eval=np.append(outer[inside][::-1], shooter.r_m))
    w_end = w_end[0]
    w_vals = sol_in.y[:, :-1].T[::-1]
    c = np.vdot(w_end, u_end) / np.vdot(w_end, w_end)
    values[n_in:][inside] = c * w_vals
    if np.any(~inside):
        d = data[0]
        rr = outer[~inside]
        amp = np.exp(d.sigma * np.log(rr / r_inf) - d.kappa * (rr - r_inf))
        values[n_in:][~inside] = c * amp[:, None] * d.value[None, :]
    sol = RadialSolution(k, float(energy), grid, values, weights, tol, local=shooter.local, local_scale=local_scale)
    tail = _tail_inner(p, k, sol, sol, r0).real
    norm_sq = float(np.sum(weights * np.sum(np.abs(values) ** 2, axis=1)) + tail)
    s = 1.0 / math.sqrt(norm_sq)
    sol.values = values * s
    sol.local_scale = local_scale * s
    sol.tail = tail * s * s
    sol.norm_sq = 1.0
    return sol


# -- eigenvalue search ------------------------------------------------------


@dataclass
class EigenvalueResult:
    k: int
    relation_row: tuple[complex, complex] | None
    eigenvalues: list[float]
    match_defects: list[float]
    errors: list[float]
    boundary_checks: list[BoundaryData | None]
    relation_residuals: list[float | None]
    eigenfunctions: list[RadialSolution] = field(default_factory=list, repr=False)
    regime: Regime | None = None

    def to_dict(self) -> dict:
        row = None
        if self.relation_row is not None:
            row = [[float(z.real), float(z.imag)] for z in self.relation_row]
        return {
            "k": self.k,
            "regime": None if self.regime is None else self.regime.value,
            "relation_row": row,
            "eigenvalues": list(self.eigenvalues),
            "errors": list(self.errors),
            "match_defects": list(self.match_defects),
            "boundary_checks": [None if b is None else b.to_dict() for b in self.boundary_checks],
            "relation_residuals": list(self.relation_residuals),
        }


def _scan_energies(params: PotentialParams, lo: float, hi: float, points: int) -> np.ndarray:
    """Points uniform in u = E / sqrt(m^2 - E^2), which spaces the hydrogenic
    accumulation at E -> m roughly evenly."""
    m = params.mass

    def to_u(e):
        return e / math.sqrt(m * m - e * e)

    u = np.linspace(to_u(lo), to_u(hi), points)
    return m * u / np.sqrt(1.0 + u * u)


def _clip_window(params: PotentialParams, window) -> tuple[float, float]:
    m = params.mass
    lo, hi = (-m, m) if window is None else (float(window[0]), float(window[1]))
    if not lo < hi:
        raise InvalidParameters(f"empty window [{lo}, {hi}]")
    if lo < -m or hi > m:
        raise EnergyOutsideGap(f"window [{lo}, {hi}] is not inside the gap [-{m}, {m}]")
    edge = m * (1.0 - EDGE_MARGIN)
    return max(lo, -edge), min(hi, edge)


def eigenvalues_in_gap(
    params: PotentialParams,
    k: int,
    relation_row=None,
    window=None,
    max_count: int | None = None,
    *,
    tol: Tolerances | None = None,
    r0: float = DEFAULT_R0,
    r_inf: float | None = None,
    scan_points: int = SCAN_POINTS,
    relation_tol: float = 1e-8,
) -> EigenvalueResult:
    """Eigenvalues of channel ``k`` in ``window`` under the row a G+ = b G-.

    ``relation_row`` must be None exactly when the channel is essentially
    self-adjoint (then the solution regular at the origin is used).  An empty
    list means no sign change of the matching determinant was found.
    """
    shooter = ChannelShooter(params, k, relation_row, tol)
    lo, hi = _clip_window(params, window)
    result = EigenvalueResult(int(k), shooter.relation_row, [], [], [], [], [], regime=shooter.local.regime)
    if not lo < hi:
        return result
    energies = _scan_energies(params, lo, hi, scan_points)
    dets = shooter.determinant(energies)
    roots = []
    xtol = 1e-13 * params.mass
    for i in np.flatnonzero(np.sign(dets[:-1]) * np.sign(dets[1:]) <= 0):
        a, b = energies[i], energies[i + 1]
        if dets[i] == 0:
            root = a
        elif dets[i + 1] == 0:
            continue
        else:
            root = brentq(shooter, a, b, xtol=xtol, rtol=1e-13)
        roots.append(root)
        if max_count is not None and len(roots) >= max_count:
            break
    tight = shooter.tol.tighter()
    r_far = max([auto_r_inf(params, e) for e in roots] + [r_inf or 0.0])
    for e in roots:
        h = 1e-6 * params.mass
        slope = (shooter(e + h) - shooter(e - h)) / (2 * h)
        defect = float(shooter.determinant([e], tight)[0])
        err = abs(defect / slope) + xtol if slope != 0 else float("inf")
        fn = eigenfunction(shooter, e, r0=r0, r_far=r_far)
        check, resid = None, None
        if shooter.relation_row is not None:
            check = extract_boundary_data(fn, params, k, window=_fit_window(r0))
            resid = check.relation_residual(shooter.relation_row)
        result.eigenvalues.append(float(e))
        result.match_defects.append(abs(float(shooter(e))))
        result.errors.append(float(err))
        result.boundary_checks.append(check)
        result.relation_residuals.append(resid)
        result.eigenfunctions.append(fn)
    if shooter.relation_row is not None:
        bad = [r for r in result.relation_residuals if r is not None and r > relation_tol]
        if bad:
            raise NonConvergent(f"eigenfunction boundary data violates the relation row (residual {max(bad):.3e})")
    return result


def _fit_window(r0: float) -> tuple[float, float]:
    return (r0, max(1e3 * r0, 1e-5))


def _sommerfeld(params: PotentialParams, k: int, n_r: int) -> float:
    """Closed-form Dirac-Coulomb level (mu = lam = 0, attractive nu < 0)."""
    g = math.sqrt(k * k - params.nu**2)
    return params.mass / math.sqrt(1.0 + params.nu**2 / (n_r + g) ** 2)


def sommerfeld_level(nu_attractive: float, k: int, n_r: int, mass: float = 1.0) -> float:
    """E = m (1 + nu^2 / (n_r + sqrt(k^2 - nu^2))^2)^(-1/2) for the potential -nu/r."""
    return _sommerfeld(PotentialParams(-nu_attractive, 0.0, 0.0, mass), k, n_r)


__all__ = [
    "ChannelShooter",
    "DecayingData",
    "EigenvalueResult",
    "RadialSolution",
    "Tolerances",
    "Trajectory",
    "auto_r_inf",
    "decay_rate",
    "eigenfunction",
    "eigenvalues_in_gap",
    "integrate_inward",
    "integrate_outward",
    "large_r_decaying_data",
    "matching_radius",
    "radial_rhs",
    "recessive_initial_data",
    "relation_ray",
    "small_r_initial_data",
    "sommerfeld_level",
]
