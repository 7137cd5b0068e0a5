"""Quadrature checks of the channel-reduced Hardy-type inequalities.

All integrals over (0, inf) are taken in tau = log(r / R), which turns the
weights 1/r and 1/(r log^2(r/R)) into dtau and dtau/tau^2.  Below r_lo and
above the support the log-weighted integrand is |f(R)|^2 / tau^2 (up to O(r_lo)),
whose integral is added in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .channels import PotentialParams
from .errors import InvalidParameters, QuadratureFailure, SupNormExceeded
from .quadrature import integrate

R_LO = 1e-10
QUAD_RTOL = 1e-11
SUP_NORM_TOL = 1e-12
RELATIVE_SLACK = 1e-8
DEFAULT_KS = (-2, -1, 1, 2)


@dataclass(frozen=True)
class Bump:
    center: float
    width: float
    amplitude: tuple[complex, complex]


@dataclass(frozen=True)
class TestSpinor:
    """f(r) = r * sum_i a_i exp(-(r - c_i)^2 / (2 s_i^2)), zero beyond r_max."""

    __test__ = False  # not a pytest class

    k: int
    bumps: tuple[Bump, ...]
    r_max: float
    generator_seed: tuple[int, ...] | None = None
    smoothness: str = "gaussian bumps times r, cut at 10 widths"

    def _parts(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        val = np.zeros((r.size, 2), dtype=complex)
        der = np.zeros((r.size, 2), dtype=complex)
        for b in self.bumps:
            x = (r - b.center) / b.width
            g = np.exp(-0.5 * x * x)
            a = np.asarray(b.amplitude, dtype=complex)
            val += (r * g)[:, None] * a
            der += (g * (1.0 - r * x / b.width))[:, None] * a
        inside = (r <= self.r_max)[:, None]
        return np.where(inside, val, 0), np.where(inside, der, 0)

    def __call__(self, r) -> np.ndarray:
        return self._parts(r)[0]

    def derivative(self, r) -> np.ndarray:
        return self._parts(r)[1]

    def profile(self, grid) -> np.ndarray:
        return self(grid)

    def scaled(self, c: complex) -> "TestSpinor":
        bumps = tuple(replace(b, amplitude=(c * b.amplitude[0], c * b.amplitude[1])) for b in self.bumps)
        return replace(self, bumps=bumps)

    def with_k(self, k: int) -> "TestSpinor":
        return replace(self, k=int(k))

    @property
    def is_zero(self) -> bool:
        return all(abs(a) == 0 for b in self.bumps for a in b.amplitude)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(sorted({b.center for b in self.bumps if 0 < b.center < self.r_max}))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "r_max": self.r_max,
            "seed": None if self.generator_seed is None else list(self.generator_seed),
            "bumps": [
                {"center": b.center, "width": b.width, "amplitude": [[z.real, z.imag] for z in map(complex, b.amplitude)]}
                for b in self.bumps
            ],
        }


def zero_spinor(k: int, r_max: float = 1.0) -> TestSpinor:
    return TestSpinor(int(k), (Bump(0.5 * r_max, 0.1 * r_max, (0j, 0j)),), r_max)


def _seed_key(seed: int, draw: int, k: int) -> tuple[int, int, int]:
    return (int(seed), int(draw), 2 * abs(int(k)) + (1 if k < 0 else 0))


def random_spinor(seed: int, draw: int, k: int) -> TestSpinor:
    """Seeded draw of 1-4 bumps; each component of each bump is switched on
    with probability 3/4, and all-zero draws are redrawn from the same stream."""
    key = _seed_key(seed, draw, k)
    rng = np.random.default_rng(key)
    while True:
        n = int(rng.integers(1, 5))
        centers = rng.uniform(0.0, 4.0, n)
        widths = rng.uniform(0.2, 1.0, n)
        amps = (rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))) * (rng.random((n, 2)) < 0.75)
        if np.any(amps != 0):
            break
    bumps = tuple(Bump(float(c), float(s), (complex(a[0]), complex(a[1]))) for c, s, a in zip(centers, widths, amps))
    r_max = float(np.max(centers + 10.0 * widths))
    return TestSpinor(int(k), bumps, r_max, key)


def random_radius(seed: int, draw: int, k: int) -> float:
    rng = np.random.default_rng((*_seed_key(seed, draw, k), 1))
    return float(rng.uniform(0.3, 3.0))


# -- quadrature in tau = log(r / R) -------------------------------------------


@dataclass
class _Acc:
    value: float = 0.0
    error: float = 0.0

    def add(self, res):
        self.value += float(np.real(res.value))
        self.error += res.error
        return self


def _segments(t_lo, t_hi, points):
    edges = sorted({t_lo, t_hi, *[p for p in points if t_lo < p < t_hi]})
    return list(zip(edges[:-1], edges[1:]))


def _tau_integral(func_r, R, r_hi, points_r=(), graded=None, rtol=QUAD_RTOL, atol=0.0) -> _Acc:
    """int_{R_LO}^{r_hi} over tau of func_r(r, tau), split at r = R and at the
    given radii.  ``graded`` maps a radius to an exponent q; segments touching
    it use tau = end +- width * s^q to absorb an endpoint singularity."""
    graded = graded or {}
    t_lo, t_hi = math.log(R_LO / R), math.log(r_hi / R)
    g_tau = {math.log(p / R): q for p, q in graded.items()}
    pts = [0.0] + [math.log(p / R) for p in points_r] + list(g_tau)
    acc = _Acc()
    for a, b in _segments(t_lo, t_hi, pts):
        qa, qb = g_tau.get(a), g_tau.get(b)
        if qa is None and qb is None:

            def f(tau):
                return func_r(R * np.exp(tau), tau)

            acc.add(integrate(f, a, b, rtol=rtol, atol=atol))
            continue
        q, start, sign = (qa, a, 1.0) if qa is not None else (qb, b, -1.0)
        w = b - a

        def f(s, q=q, start=start, sign=sign, w=w):
            tau = start + sign * w * s**q
            return func_r(R * np.exp(tau), tau) * q * w * s ** (q - 1.0)

        acc.add(integrate(f, 0.0, 1.0, rtol=rtol, atol=atol))
    return acc


def _log_term(func, R, r_hi, points_r=(), graded=None, far_value=None) -> _Acc:
    """(1/4) int_0^inf |f(r) - f(R)|^2 / (r log^2(r/R)) dr for f constant
    (equal to f(r_hi), or ``far_value``) beyond r_hi and ~ f(0+) below R_LO."""
    def at(r):
        return np.atleast_1d(np.asarray(func(np.array([r]), np.array([math.log(r / R)]))).reshape(-1))

    fR, f0 = at(R), at(R_LO)
    f_far = at(r_hi) if far_value is None else np.atleast_1d(far_value)

    def integrand(r, tau):
        diff = np.asarray(func(r, tau)).reshape(r.size, -1) - fR[None, :]
        return np.sum(np.abs(diff) ** 2, axis=1) / (tau * tau)

    acc = _tau_integral(integrand, R, r_hi, points_r, graded)
    acc.value += float(np.sum(np.abs(f0 - fR) ** 2)) / abs(math.log(R_LO / R))
    acc.value += float(np.sum(np.abs(f_far - fR) ** 2)) / math.log(r_hi / R)
    acc.value *= 0.25
    acc.error *= 0.25
    return acc


@dataclass(frozen=True)
class Sides:
    lhs: float
    rhs: float
    error: float = 0.0

    def __iter__(self):
        return iter((self.lhs, self.rhs))

    def margin(self, greater: str = "lhs") -> float:
        return self.lhs - self.rhs if greater == "lhs" else self.rhs - self.lhs


def _check_support(f: TestSpinor, R: float):
    if not 0 < R < f.r_max:
        raise InvalidParameters(f"R={R} must lie inside the support (0, {f.r_max})")


def _plus_minus_parts(f: TestSpinor, r):
    v, d = f(r), f.derivative(r)
    k = f.k
    gp = d[:, 0] + k * v[:, 0] / r  # (d/dr + k/r) f+
    gm = -d[:, 1] + k * v[:, 1] / r  # (-d/dr + k/r) f-
    return v, gp, gm


def _weighted_l2_over_r(f: TestSpinor, R) -> _Acc:
    return _tau_integral(lambda r, tau: np.sum(np.abs(f(r)) ** 2, axis=1), R, f.r_max, f.breakpoints)


def _free_form(f: TestSpinor, R) -> _Acc:
    def integrand(r, tau):
        _, gp, gm = _plus_minus_parts(f, r)
        return r * r * (np.abs(gp) ** 2 + np.abs(gm) ** 2)

    return _tau_integral(integrand, R, f.r_max, f.breakpoints)


def hardy_sides(f: TestSpinor, R: float) -> Sides:
    """lhs = int r (|(d + k/r) f+|^2 + |(-d + k/r) f-|^2) dr,
    rhs = int |f|^2 / r dr + (1/4) int |f - f(R)|^2 / (r log^2(r/R)) dr."""
    if f.is_zero:
        return Sides(0.0, 0.0)
    _check_support(f, R)
    lhs = _free_form(f, R)
    l2 = _weighted_l2_over_r(f, R)
    log = _log_term(lambda r, tau: f(r), R, f.r_max, f.breakpoints, far_value=np.zeros(2))
    return Sides(lhs.value, l2.value + log.value, lhs.error + l2.error + log.error)


def hardy_lhs_alternative(f: TestSpinor, R: float = 1.0) -> float:
    """int r |f'|^2 + k^2 |f|^2 / r, equal to the hardy lhs after integrating
    the cross terms by parts."""
    if f.is_zero:
        return 0.0
    a = _tau_integral(lambda r, tau: r * r * np.sum(np.abs(f.derivative(r)) ** 2, axis=1), R, f.r_max, f.breakpoints)
    return a.value + f.k**2 * _weighted_l2_over_r(f, R).value


@dataclass(frozen=True)
class Profile1D:
    """phi on (0, r_max] with its derivative; phi is continued by the
    constant phi(r_max) beyond r_max.  ``graded`` lists radii where phi'
    has an integrable singularity, with the grading exponent to use."""

    func: Callable
    deriv: Callable
    r_max: float
    breakpoints: tuple[float, ...] = ()
    graded: tuple[tuple[float, float], ...] = ()

    def __call__(self, r):
        return np.asarray(self.func(np.asarray(r, dtype=float)))

    def values(self, r, tau, R):
        return np.asarray(self.func(r)).reshape(np.size(r), -1)

    def r_deriv(self, r, tau, R):
        """r phi'(r), i.e. d phi / d tau."""
        return (r * np.asarray(self.deriv(r)).reshape(np.size(r), -1).T).T


def log_hardy_sides(phi: Profile1D, R: float) -> Sides:
    """lhs = int r |phi'|^2 dr, rhs = (1/4) int |phi - phi(R)|^2 / (r log^2(r/R)) dr."""
    if not 0 < R < phi.r_max:
        raise InvalidParameters(f"R={R} must lie inside (0, {phi.r_max})")
    graded = dict(phi.graded)
    pts = [p for p in phi.breakpoints if p not in graded]

    def lhs_int(r, tau):
        return np.sum(np.abs(phi.r_deriv(r, tau, R)) ** 2, axis=1)

    lhs = _tau_integral(lhs_int, R, phi.r_max, pts, graded)
    rhs = _log_term(lambda r, tau=None: phi.values(r, tau, R), R, phi.r_max, pts, graded)
    return Sides(lhs.value, rhs.value, lhs.error + rhs.error)


def min_profile() -> Profile1D:
    """min(r, 1) on (0, 2]."""
    return Profile1D(
        func=lambda r: np.minimum(r, 1.0),
        deriv=lambda r: np.where(r < 1.0, 1.0, 0.0),
        r_max=2.0,
        breakpoints=(1.0,),
    )


def component_profile(f: TestSpinor, index: int) -> Profile1D:
    return Profile1D(
        func=lambda r: f(r)[:, index],
        deriv=lambda r: f.derivative(r)[:, index],
        r_max=f.r_max,
        breakpoints=f.breakpoints,
    )


@dataclass(frozen=True)
class SharpnessProfile(Profile1D):
    """phi = 0 on (0, R], log(r/R)^a on [R, eR], 1 beyond; a > 1/2.

    Both sides ignore additive constants, so this stands for the compactly
    supported phi - 1.  For this family lhs / rhs = 2a, so the ratio
    decreases to 1 as a -> 1/2.
    Values are computed from tau = log(r/R) directly: the graded quadrature
    puts nodes at tau far below the spacing of floats near r = R.
    """

    exponent: float = 1.0
    center: float = 1.0

    def _tau(self, r, tau, R):
        if tau is None or R != self.center:
            return np.log(np.asarray(r, dtype=float) / self.center)
        return np.asarray(tau, dtype=float)

    def values(self, r, tau, R):
        t = self._tau(r, tau, R)
        tc = np.clip(t, 0.0, 1.0)
        return np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, tc**self.exponent))[:, None]

    def r_deriv(self, r, tau, R):
        t = self._tau(r, tau, R)
        inside = (t > 0) & (t < 1)
        tc = np.where(inside, t, 1.0)
        return np.where(inside, self.exponent * tc ** (self.exponent - 1.0), 0.0)[:, None]


def sharpness_profile(a: float, R: float = 1.0) -> SharpnessProfile:
    if not a > 0.5:
        raise InvalidParameters("the probe exponent must exceed 1/2")
    e_r = math.e * R
    prof = SharpnessProfile(None, None, e_r, breakpoints=(e_r,), graded=((R, 1.0 / (2.0 * a - 1.0)),), exponent=a, center=R)
    return replace(prof, func=lambda r: prof.values(r, None, R)[:, 0], deriv=lambda r: prof.r_deriv(r, None, R)[:, 0] / r)


@dataclass(frozen=True)
class SharpnessProbe:
    exponents: tuple[float, ...]
    ratios: tuple[float, ...]

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.ratios, self.ratios[1:]))

    def to_dict(self) -> dict:
        return {"exponents": list(self.exponents), "ratios": list(self.ratios), "strictly_decreasing": self.strictly_decreasing}


def sharpness_probe(steps: int = 5, R: float = 1.0) -> SharpnessProbe:
    exps = tuple(0.5 + 2.0 ** -(j + 1) for j in range(steps))
    ratios = []
    for a in exps:
        s = log_hardy_sides(sharpness_profile(a, R), R)
        ratios.append(s.lhs / s.rhs)
    return SharpnessProbe(exps, tuple(ratios))


def kato_nenciu_sides(f: TestSpinor, m: float, epsilon: float, R: float = 1.0) -> Sides:
    """lhs = int |f|^2 / r dr, rhs = int r |(m + i eps) f+ + (-d + k/r) f-|^2
    + r |(d + k/r) f+ + (-m + i eps) f-|^2 dr.  ``R`` only sets the split of
    the quadrature."""
    if f.is_zero:
        return Sides(0.0, 0.0)
    R = min(R, 0.5 * f.r_max)

    def integrand(r, tau):
        v, gp, gm = _plus_minus_parts(f, r)
        up = (m + 1j * epsilon) * v[:, 0] + gm
        dn = gp + (-m + 1j * epsilon) * v[:, 1]
        return r * r * (np.abs(up) ** 2 + np.abs(dn) ** 2)

    rhs = _tau_integral(integrand, R, f.r_max, f.breakpoints)
    lhs = _weighted_l2_over_r(f, R)
    return Sides(lhs.value, rhs.value, lhs.error + rhs.error)


def interaction_matrix(params: PotentialParams) -> np.ndarray:
    """r times the potential part of the channel operator."""
    nu, mu, lam = params.nu, params.mu, params.lam
    return np.array([[nu + mu, lam], [lam, nu - mu]])


def form_lower_bound_sides(f: TestSpinor, params: PotentialParams, R: float) -> Sides:
    """(q, bound): q = int r |h_free f|^2 - int |V f|^2 r dr, bound the log term."""
    if params.sup_norm > 1.0 + SUP_NORM_TOL:
        raise SupNormExceeded(f"|nu| + sqrt(mu^2 + lambda^2) = {params.sup_norm:.12g} > 1")
    if f.is_zero:
        return Sides(0.0, 0.0)
    _check_support(f, R)
    S = interaction_matrix(params)
    free = _free_form(f, R)
    pot = _tau_integral(lambda r, tau: np.sum(np.abs(f(r) @ S.T) ** 2, axis=1), R, f.r_max, f.breakpoints)
    log = _log_term(lambda r, tau: f(r), R, f.r_max, f.breakpoints, far_value=np.zeros(2))
    return Sides(free.value - pot.value, log.value, free.error + pot.error + log.error)


# -- corpus ---------------------------------------------------------------------


@dataclass(frozen=True)
class DrawRecord:
    check: str
    k: int
    draw: int
    seed: tuple[int, ...]
    R: float
    lhs: float
    rhs: float
    margin: float
    error: float
    status: str

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "k": self.k,
            "draw": self.draw,
            "seed": list(self.seed),
            "R": self.R,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "error": self.error,
            "status": self.status,
        }


def _status(margin: float, scale: float, error: float) -> str:
    if margin >= 0:
        return "ok"
    if -margin <= max(RELATIVE_SLACK * scale, error):
        return "noise"
    return "violation"


def _record(check, f, draw, R, sides: Sides, greater="lhs") -> DrawRecord:
    margin = sides.margin(greater)
    scale = max(abs(sides.lhs), abs(sides.rhs))
    return DrawRecord(check, f.k, draw, f.generator_seed or (), R, sides.lhs, sides.rhs, margin, sides.error, _status(margin, scale, sides.error))


@dataclass
class CorpusReport:
    seed: int
    trials: int
    ks: tuple[int, ...]
    params: PotentialParams | None
    records: list[DrawRecord] = field(default_factory=list)
    sharpness: SharpnessProbe | None = None

    @property
    def violations(self) -> list[DrawRecord]:
        return [r for r in self.records if r.status == "violation"]

    @property
    def ok(self) -> bool:
        return not self.violations and (self.sharpness is None or self.sharpness.strictly_decreasing)

    def minima(self) -> dict:
        out: dict[str, dict] = {}
        for rec in self.records:
            rel = rec.margin / max(abs(rec.lhs), abs(rec.rhs), 1e-300)
            cur = out.get(rec.check)
            if cur is None or rel < cur["min_relative_margin"]:
                out[rec.check] = {"min_relative_margin": rel, "min_margin": rec.margin, "k": rec.k, "draw": rec.draw}
        return dict(sorted(out.items()))

    def to_dict(self, include_draws: bool = True) -> dict:
        out = {
            "seed": self.seed,
            "trials": self.trials,
            "ks": list(self.ks),
            "params": None if self.params is None else self.params.to_dict(),
            "ok": self.ok,
            "violations": len(self.violations),
            "noise": sum(r.status == "noise" for r in self.records),
            "minima": self.minima(),
            "sharpness": None if self.sharpness is None else self.sharpness.to_dict(),
        }
        if include_draws:
            out["draws"] = [r.to_dict() for r in self.records]
        return out


KN_SETTINGS = ((0.0, 0.0), (1.0, 0.5))


def run_corpus(
    trials: int = 100,
    seed: int = 0,
    ks=DEFAULT_KS,
    params: PotentialParams | None = None,
    kato_nenciu=KN_SETTINGS,
    sharpness_steps: int = 5,
) -> CorpusReport:
    """Evaluate every inequality on ``trials`` seeded spinors per k."""
    if trials < 1:
        raise InvalidParameters("need at least one trial")
    if params is not None and params.sup_norm > 1.0 + SUP_NORM_TOL:
        raise SupNormExceeded(f"|nu| + sqrt(mu^2 + lambda^2) = {params.sup_norm:.12g} > 1")
    report = CorpusReport(seed, trials, tuple(ks), params)
    for k in ks:
        for draw in range(trials):
            f = random_spinor(seed, draw, k)
            R = min(random_radius(seed, draw, k), 0.9 * f.r_max)
            try:
                report.records.append(_record("hardy", f, draw, R, hardy_sides(f, R)))
                for m, eps in kato_nenciu:
                    report.records.append(_record(f"kato_nenciu(m={m:g},eps={eps:g})", f, draw, R, kato_nenciu_sides(f, m, eps, R), "rhs"))
                for idx, name in ((0, "plus"), (1, "minus")):
                    prof = component_profile(f, idx)
                    if np.any(f(np.linspace(0, f.r_max, 64))[:, idx] != 0):
                        report.records.append(_record(f"log_hardy({name})", f, draw, R, log_hardy_sides(prof, R)))
                if params is not None:
                    report.records.append(_record("form_bound", f, draw, R, form_lower_bound_sides(f, params, R)))
            except QuadratureFailure as exc:
                raise QuadratureFailure(f"k={k} draw={draw}: {exc}") from exc
    if sharpness_steps:
        report.sharpness = sharpness_probe(sharpness_steps)
    return report
