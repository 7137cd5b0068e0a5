"""Boundary values at the origin for the channels that need a boundary condition.

Near r = 0 every function of the maximal domain of a channel behaves like one
of three models, with complex coefficients (A+, A-):

* subcritical, 0 < delta < 1/4:   f ~ D (A+ r^gamma, A- r^-gamma)
* critical, delta = 0:            f ~ (M log r + I) (A+, A-)
* supercritical, delta < 0:       f ~ E (A+ r^{i gamma}, A- r^{-i gamma})

and the boundary values are (G+, G-) = C (A+, A-) with C = D, I, E
respectively.  With these, for f, g in the maximal domain,

    <f, h* g> - <h* f, g> = G+(f) conj(G-(g)) - G-(f) conj(G+(g)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import frobenius
from ._system import BETA, J, apply_radial_operator, coupling_matrix, fuchs_matrix, kappa
from .channels import ChannelClassification, PotentialParams, Regime, classify_channel
from .errors import ChannelMismatch, EssentiallySelfAdjointChannel, IllConditionedFit, NonConvergent
from .quadrature import integrate

#: |k + lam - gamma| below this selects the second branch of D
BRANCH_TOL = 1e-12
DEFAULT_WINDOW = (1e-8, 1e-5)
COND_MAX = 1e10


@dataclass(frozen=True)
class ConnectionMatrix:
    k: int
    regime: Regime
    entries: np.ndarray
    gamma: float
    branch: int = 1

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "regime": self.regime.value,
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        }


@dataclass(frozen=True)
class BoundaryData:
    k: int
    gamma_plus: complex
    gamma_minus: complex
    coeffs: tuple[complex, complex]
    fit_residual: float = 0.0

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.gamma_plus, self.gamma_minus], dtype=complex)

    def relation_residual(self, row) -> float:
        """|a G+ - b G-| relative to |(a, b)| |(G+, G-)|; zero data gives 0."""
        a, b = complex(row[0]), complex(row[1])
        scale = math.hypot(abs(a), abs(b)) * float(np.linalg.norm(self.vector))
        if scale == 0.0:
            return 0.0
        return abs(a * self.gamma_plus - b * self.gamma_minus) / scale

    def to_dict(self) -> dict:
        def c(z):
            return [float(z.real), float(z.imag)]

        return {
            "k": self.k,
            "gamma_plus": c(self.gamma_plus),
            "gamma_minus": c(self.gamma_minus),
            "coeffs": [c(self.coeffs[0]), c(self.coeffs[1])],
            "fit_residual": self.fit_residual,
        }


def _classification(params: PotentialParams, k: int) -> ChannelClassification:
    cls = classify_channel(params, k)
    if not cls.regime.has_boundary_data:
        raise EssentiallySelfAdjointChannel(
            f"channel k={k} has delta={cls.delta:.6g} >= 1/4: essentially self-adjoint, no boundary data"
        )
    return cls


def uses_second_branch(params: PotentialParams, k: int, gamma: float) -> bool:
    return abs(kappa(params, k) - gamma) <= BRANCH_TOL * max(1.0, abs(kappa(params, k)))


def connection_matrix(params: PotentialParams, k: int) -> ConnectionMatrix:
    cls = _classification(params, k)
    kap = kappa(params, k)
    nu, mu, g = params.nu, params.mu, cls.gamma
    if cls.regime is Regime.SUBCRITICAL:
        if uses_second_branch(params, k, g):
            assert abs(mu * mu - nu * nu) <= 1e-9 * max(1.0, nu * nu), "second branch needs mu^2 = nu^2"
            mat = np.array([[mu - nu, 2 * g], [2 * g, -(nu + mu)]]) / (-4.0 * g * g)
            return ConnectionMatrix(k, cls.regime, mat.astype(complex), g, branch=2)
        a = kap - g
        mat = np.array([[a, nu - mu], [-(nu + mu), -a]]) / (2.0 * g * a)
        return ConnectionMatrix(k, cls.regime, mat.astype(complex), g, branch=1)
    if cls.regime is Regime.CRITICAL:
        return ConnectionMatrix(k, cls.regime, fuchs_matrix(params, k).astype(complex), 0.0)
    a = kap - 1j * g
    mat = np.array([[a, nu - mu], [-(nu + mu), -a]]) / (2j * g * a)
    return ConnectionMatrix(k, cls.regime, mat, g)


def boundary_matrix(conn: ConnectionMatrix) -> np.ndarray:
    """Map (A+, A-) -> (G+, G-); identity in the critical regime."""
    if conn.regime is Regime.CRITICAL:
        return np.eye(2, dtype=complex)
    return conn.entries


def _branch_exponents(conn: ConnectionMatrix):
    if conn.regime is Regime.SUBCRITICAL:
        return conn.gamma, -conn.gamma
    return 1j * conn.gamma, -1j * conn.gamma


def solution_basis(params: PotentialParams, k: int, r, energy: float | None = None) -> np.ndarray:
    """Array (n, 2, 2) whose columns are the two model solutions, so that
    ``basis @ (A+, A-)`` is the model value at each radius.

    Without ``energy`` only the leading (energy independent) terms are used;
    with an energy the columns are the exact solutions of h f = E f having
    those leading terms.
    """
    conn = connection_matrix(params, k)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    N = fuchs_matrix(params, k)
    order = 0 if energy is None else None
    P = coupling_matrix(params, 0.0 if energy is None else energy)
    out = np.empty((r.size, 2, 2), dtype=complex)
    if conn.regime is Regime.CRITICAL:
        for j in range(2):
            out[:, :, j] = frobenius.log_series(N, P, np.eye(2)[j], r, order=order)
        return out
    for j, s in enumerate(_branch_exponents(conn)):
        out[:, :, j] = frobenius.power_series(N, P, s, conn.entries[:, j], r, order=order)
    return out


def asymptotic_model(params: PotentialParams, k: int, coeffs, r):
    """Leading-order model value (f+(r), f-(r)) for coefficients (A+, A-)."""
    scalar = np.ndim(r) == 0
    vals = solution_basis(params, k, r) @ np.asarray(coeffs, dtype=complex)
    return vals[0] if scalar else vals


def boundary_data_from_coeffs(params: PotentialParams, k: int, coeffs, fit_residual: float = 0.0) -> BoundaryData:
    conn = connection_matrix(params, k)
    a = np.asarray(coeffs, dtype=complex)
    g = boundary_matrix(conn) @ a
    return BoundaryData(int(k), complex(g[0]), complex(g[1]), (complex(a[0]), complex(a[1])), fit_residual)


def coeffs_from_boundary(params: PotentialParams, k: int, gamma_pm) -> np.ndarray:
    conn = connection_matrix(params, k)
    return np.linalg.solve(boundary_matrix(conn), np.asarray(gamma_pm, dtype=complex))


def extract_boundary_data(
    samples,
    params: PotentialParams,
    k: int,
    window: tuple[float, float] = DEFAULT_WINDOW,
    *,
    use_energy: bool = True,
    cond_max: float = COND_MAX,
) -> BoundaryData:
    """Least-squares fit of (A+, A-) on the samples inside ``window``.

    ``samples`` is a :class:`~diracext.radial_ode.RadialSolution` (anything
    with ``grid``, ``values``, ``energy`` and ``k``).  When the samples carry
    an energy and ``use_energy`` is set, the fit basis is the exact local
    solution basis at that energy; otherwise the leading-order model.
    """
    if getattr(samples, "k", k) != k:
        raise ChannelMismatch(f"samples belong to k={samples.k}, requested k={k}")
    r = np.asarray(samples.grid, dtype=float)
    y = np.asarray(samples.values, dtype=complex)
    lo, hi = window
    sel = (r >= lo) & (r <= hi)
    if sel.sum() < 3:
        raise ValueError(f"need at least 3 samples in window [{lo:g}, {hi:g}], got {int(sel.sum())}")
    r, y = r[sel], y[sel]
    energy = getattr(samples, "energy", None) if use_energy else None
    basis = solution_basis(params, k, r, energy)
    # row weights make every radius count equally regardless of r^(+-gamma) growth
    w = 1.0 / np.linalg.norm(basis, axis=(1, 2))
    X = (basis * w[:, None, None]).reshape(-1, 2)
    rhs = (y * w[:, None]).reshape(-1)
    col = np.linalg.norm(X, axis=0)
    cond = np.linalg.cond(X / col)
    if not np.isfinite(cond) or cond > cond_max:
        raise IllConditionedFit(f"design matrix condition number {cond:.3e} exceeds {cond_max:.1e}")
    sol, *_ = np.linalg.lstsq(X, rhs, rcond=None)
    denom = np.linalg.norm(rhs)
    resid = float(np.linalg.norm(X @ sol - rhs) / denom) if denom > 0 else 0.0
    return boundary_data_from_coeffs(params, k, sol, fit_residual=resid)


def boundary_form(lhs: BoundaryData, rhs: BoundaryData) -> complex:
    """G+(f) conj(G-(g)) - G-(f) conj(G+(g))."""
    if lhs.k != rhs.k:
        raise ChannelMismatch(f"boundary data from different channels: k={lhs.k} vs k={rhs.k}")
    return lhs.gamma_plus * np.conj(rhs.gamma_minus) - lhs.gamma_minus * np.conj(rhs.gamma_plus)


def wronskian_determinant(f_vals, g_vals) -> np.ndarray:
    """det [f+, conj g+; f-, conj g-] pointwise."""
    f_vals = np.asarray(f_vals)
    g_vals = np.asarray(g_vals)
    return f_vals[..., 0] * np.conj(g_vals[..., 1]) - f_vals[..., 1] * np.conj(g_vals[..., 0])


def _interp_log(solution, eps):
    t = np.log(np.asarray(solution.grid, dtype=float))
    spline = CubicSpline(t, np.asarray(solution.values, dtype=complex), axis=0)
    return spline(np.log(eps))


def wronskian_limit(
    f,
    g,
    *,
    params: PotentialParams | None = None,
    eps_start: float | None = None,
    terms: int = 8,
    rtol: float = 1e-6,
) -> complex:
    """Limit eps -> 0 of the boundary determinant of two radial functions.

    The determinant is sampled at eps_n = eps_start / 2^n (n < terms) and one
    Richardson elimination is applied, assuming a leading error ~ eps^p with
    p = 1 - 2 gamma in the subcritical regime and p = 1 otherwise (the
    exponent is only known when ``params`` is given).  Raises
    :class:`NonConvergent` when consecutive extrapolants disagree by more
    than ``rtol``.
    """
    if f.k != g.k:
        raise ChannelMismatch(f"solutions from different channels: k={f.k} vs k={g.k}")
    r_min = max(float(f.grid[0]), float(g.grid[0]))
    if eps_start is None:
        eps_start = r_min * 2 ** (terms - 1)
    eps = eps_start / 2.0 ** np.arange(terms)
    if eps[-1] < r_min * (1 - 1e-12):
        raise ValueError("eps sequence extends below the sampled grid")
    dets = wronskian_determinant(_interp_log(f, eps), _interp_log(g, eps))
    p = 1.0
    if params is not None:
        cls = classify_channel(params, f.k)
        if cls.regime is Regime.SUBCRITICAL:
            p = 1.0 - 2.0 * cls.gamma
    q = 2.0**-p
    extrap = (dets[1:] - q * dets[:-1]) / (1.0 - q)
    fmag = np.linalg.norm(_interp_log(f, eps[-1:]), axis=-1) * np.linalg.norm(_interp_log(g, eps[-1:]), axis=-1)
    # cancellation noise is ~1e-16 |f||g|; genuine divergence grows like |f||g|
    scale = max(float(np.max(np.abs(extrap))), 1e-6 * float(fmag[0]))
    if scale == 0.0:
        return 0j
    jumps = np.abs(np.diff(extrap[-3:])) / scale
    if np.any(jumps > rtol):
        raise NonConvergent(
            f"Wronskian extrapolants differ by {jumps.max():.3e} (relative); inputs may lie outside the maximal domain"
        )
    return complex(extrap[-1])


class MaximalDomainFunction:
    """An element of the maximal domain of one channel with known boundary data:

        F(r) = chi(r) * model(r; A+, A-) + r * p(r) * exp(-r)

    where chi is a smooth cutoff (1 on [0, 1], 0 beyond 2) and p a complex
    vector polynomial.  h* F is available in closed form: the model solves
    the leading-order system exactly, so h*(chi u) = chi m beta u + chi' J u.
    """

    def __init__(self, params: PotentialParams, k: int, coeffs, poly=None, cutoff=(1.0, 2.0)):
        self.params = params
        self.k = int(k)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.poly = np.zeros((1, 2), dtype=complex) if poly is None else np.asarray(poly, dtype=complex)
        self.cutoff = cutoff
        self.boundary = boundary_data_from_coeffs(params, k, self.coeffs)

    def _chi(self, r):
        a, b = self.cutoff
        x = np.clip((r - a) / (b - a), 0.0, 1.0)

        def psi(s):
            with np.errstate(divide="ignore", over="ignore"):
                return np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)

        num, den = psi(1 - x), psi(1 - x) + psi(x)
        chi = num / den
        # derivative of psi(1-x)/(psi(1-x)+psi(x)) w.r.t. r
        with np.errstate(divide="ignore", invalid="ignore"):
            dpsi = lambda s: np.where(s > 0, psi(s) / np.where(s > 0, s, 1.0) ** 2, 0.0)  # noqa: E731
            dchi_dx = (-dpsi(1 - x) * den - num * (-dpsi(1 - x) + dpsi(x))) / den**2
        dchi = np.where((x > 0) & (x < 1), dchi_dx / (b - a), 0.0)
        return chi, dchi

    def _smooth_part(self, r):
        r = np.asarray(r, dtype=float)
        deg = self.poly.shape[0]
        powers = np.stack([r**n for n in range(deg)], axis=1)
        dpowers = np.stack([n * r ** max(n - 1, 0) if n else np.zeros_like(r) for n in range(deg)], axis=1)
        p = powers @ self.poly
        dp = dpowers @ self.poly
        e = np.exp(-r)[:, None]
        val = r[:, None] * p * e
        der = (p + r[:, None] * dp - r[:, None] * p) * e
        return val, der

    def __call__(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        chi, _ = self._chi(r)
        model = asymptotic_model(self.params, self.k, self.coeffs, r)
        smooth, _ = self._smooth_part(r)
        return chi[:, None] * model + smooth

    def apply_maximal(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        chi, dchi = self._chi(r)
        model = asymptotic_model(self.params, self.k, self.coeffs, r)
        smooth, dsmooth = self._smooth_part(r)
        h_model = chi[:, None] * self.params.mass * (model @ BETA.T) + dchi[:, None] * (model @ J.T)
        return h_model + apply_radial_operator(self.params, self.k, r, smooth, dsmooth)


@dataclass(frozen=True)
class GreenPairing:
    value: complex
    sequence: tuple[complex, ...]
    eps: tuple[float, ...]
    error: float


def green_pairing(f, hf, g, hg, *, eps=(1e-12, 1e-18, 1e-24, 1e-30), r_max: float = 60.0, rtol: float = 1e-13) -> GreenPairing:
    """int_eps^r_max (f . conj(h* g) - h* f . conj(g)) dr for a decreasing
    sequence of eps, with Aitken extrapolation of the last three values.

    Integration runs in t = log r so the algebraic singularity at the origin
    becomes an exponentially decaying tail.
    """

    def integrand(t):
        r = np.exp(t)
        fv, gv = f(r), g(r)
        val = np.sum(fv * np.conj(hg(r)), axis=1) - np.sum(hf(r) * np.conj(gv), axis=1)
        return val * r

    t_hi = math.log(r_max)
    values, err = [], 0.0
    # integrate slab by slab so each eps reuses the previous integral
    acc = 0j
    upper = t_hi
    for e in eps:
        lo = math.log(e)
        res = integrate(integrand, lo, upper, points=[p for p in (0.0, math.log(2.0)) if lo < p < upper], rtol=rtol, atol=1e-16)
        acc += res.value
        err += res.error
        values.append(acc)
        upper = lo
    seq = np.array(values)
    if len(seq) >= 3:
        d1, d2 = seq[-1] - seq[-2], seq[-2] - seq[-3]
        denom = d1 - d2
        limit = seq[-1] - d1 * d1 / denom if abs(denom) > 1e-300 and abs(d1) < abs(d2) else seq[-1]
    else:
        limit = seq[-1]
    return GreenPairing(complex(limit), tuple(complex(v) for v in seq), tuple(eps), float(err))
