"""Partial-wave bookkeeping for the Dirac operator with a Coulomb-type matrix potential.

The potential is

    V(x) = (nu * I4 + mu * beta - i * lam * alpha.x_hat beta) / |x|

and every partial-wave channel (j, m_j, k_j) reduces it to a 2x2 radial
system.  Whether a channel needs a boundary condition at the origin is
decided by

    delta_k = (k + lam)**2 + mu**2 - nu**2 .

Half-integers j and m_j are stored doubled so all ordering logic is exact.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .errors import InvalidParameters

#: absolute tolerance used when comparing delta with 0 and 1/4
REGIME_TOL = 1e-12


class RegimeBoundaryWarning(UserWarning):
    """delta lies within the classification tolerance of 0 or 1/4."""


class Regime(str, enum.Enum):
    ESSENTIALLY_SELF_ADJOINT = "essentially_self_adjoint"
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"

    @property
    def has_boundary_data(self) -> bool:
        return self is not Regime.ESSENTIALLY_SELF_ADJOINT


@dataclass(frozen=True)
class PotentialParams:
    """Coupling constants (nu, mu, lam) and mass m; hbar = c = 1."""

    nu: float
    mu: float
    lam: float
    mass: float = 1.0

    def __post_init__(self):
        for name in ("nu", "mu", "lam", "mass"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))

    @cached_property
    def sup_norm(self) -> float:
        """sup_x |x| |V(x)| = |nu| + sqrt(mu^2 + lam^2)."""
        return abs(self.nu) + math.hypot(self.mu, self.lam)

    def to_dict(self) -> dict:
        return {"nu": self.nu, "mu": self.mu, "lambda": self.lam, "mass": self.mass}


@dataclass(frozen=True, order=True)
class Channel:
    """Partial-wave label with j = twice_j / 2 and m_j = twice_mj / 2."""

    twice_j: int
    twice_mj: int
    k: int

    def __post_init__(self):
        if self.twice_j < 1 or self.twice_j % 2 != 1:
            raise InvalidParameters(f"twice_j must be a positive odd integer, got {self.twice_j}")
        if self.twice_mj % 2 != 1 and self.twice_mj % 2 != -1:
            raise InvalidParameters(f"twice_mj must be odd, got {self.twice_mj}")
        if abs(self.twice_mj) > self.twice_j:
            raise InvalidParameters("|m_j| exceeds j")
        if 2 * abs(self.k) != self.twice_j + 1:
            raise InvalidParameters(f"|k| must equal j + 1/2, got k={self.k} for 2j={self.twice_j}")

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def m_j(self) -> float:
        return self.twice_mj / 2

    def label(self) -> str:
        return f"({self.twice_j}/2, {self.twice_mj}/2, {self.k})"

    def to_dict(self) -> dict:
        return {"twice_j": self.twice_j, "twice_mj": self.twice_mj, "k": self.k}


@dataclass(frozen=True)
class ChannelClassification:
    k: int
    delta: float
    gamma: float
    regime: Regime
    near_boundary: bool = False

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "delta": self.delta,
            "gamma": self.gamma,
            "regime": self.regime.value,
            "near_boundary": self.near_boundary,
        }


@dataclass(frozen=True)
class IndexSet:
    """The ordered set I of channels with delta < 1/4."""

    entries: tuple[Channel, ...] = field(default_factory=tuple)

    @property
    def d(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Channel]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> Channel:
        return self.entries[i]

    def to_dict(self) -> dict:
        return {"d": self.d, "entries": [c.to_dict() for c in self.entries]}

    @classmethod
    def from_dict(cls, data: dict) -> "IndexSet":
        entries = tuple(Channel(int(e["twice_j"]), int(e["twice_mj"]), int(e["k"])) for e in data["entries"])
        if int(data["d"]) != len(entries):
            raise InvalidParameters("IndexSet JSON: d does not match number of entries")
        return cls(entries)


def _check_k(k: int) -> int:
    if int(k) != k or k == 0:
        raise InvalidParameters(f"k must be a nonzero integer, got {k!r}")
    return int(k)


def delta(params: PotentialParams, k: int) -> float:
    """(k + lam)^2 + mu^2 - nu^2."""
    k = _check_k(k)
    return (k + params.lam) ** 2 + params.mu**2 - params.nu**2


def classify_channel(params: PotentialParams, k: int, tol: float = REGIME_TOL) -> ChannelClassification:
    """Regime of channel k.  Values within ``tol`` of a regime boundary are
    put on the boundary (critical, resp. essentially self-adjoint) and flagged
    with a :class:`RegimeBoundaryWarning`."""
    dlt = delta(params, k)
    near = abs(dlt) <= tol or abs(dlt - 0.25) <= tol
    if dlt >= 0.25 - tol:
        regime = Regime.ESSENTIALLY_SELF_ADJOINT
    elif dlt > tol:
        regime = Regime.SUBCRITICAL
    elif dlt >= -tol:
        regime = Regime.CRITICAL
    else:
        regime = Regime.SUPERCRITICAL
    if near and not _exact_boundary(dlt):
        warnings.warn(
            f"delta_{k} = {dlt!r} is within {tol:g} of a regime boundary; classified as {regime.value}",
            RegimeBoundaryWarning,
            stacklevel=2,
        )
    return ChannelClassification(k=int(k), delta=dlt, gamma=math.sqrt(abs(dlt)), regime=regime, near_boundary=near)


def _exact_boundary(dlt: float) -> bool:
    return dlt == 0.0 or dlt == 0.25


def k_scan_bound(params: PotentialParams) -> int:
    """delta_k < 1/4 forces |k + lam| < 1/2 + |nu|, hence |k| <= this bound."""
    return math.ceil(0.5 + abs(params.nu) + abs(params.lam))


def deficient_k_values(params: PotentialParams, tol: float = REGIME_TOL) -> list[int]:
    bound = k_scan_bound(params)
    out = []
    for k in range(-bound, bound + 1):
        if k != 0 and delta(params, k) < 0.25 - tol:
            out.append(k)
    return out


def deficiency_dimension(params: PotentialParams, tol: float = REGIME_TOL) -> int:
    return sum(2 * abs(k) for k in deficient_k_values(params, tol))


def enumerate_index_set(params: PotentialParams, tol: float = REGIME_TOL) -> IndexSet:
    """Channels with delta < 1/4 in the canonical order: ascending j; for fixed
    j first k = j + 1/2 then k = -(j + 1/2); m_j ascending within each k."""
    qualifying = set(deficient_k_values(params, tol))
    if not qualifying:
        return IndexSet()
    entries = []
    max_abs_k = max(abs(k) for k in qualifying)
    for abs_k in range(1, max_abs_k + 1):
        twice_j = 2 * abs_k - 1
        for k in (abs_k, -abs_k):
            if k not in qualifying:
                continue
            entries.extend(Channel(twice_j, twice_mj, k) for twice_mj in range(-twice_j, twice_j + 1, 2))
    return IndexSet(tuple(entries))


def classify_all(params: PotentialParams, tol: float = REGIME_TOL) -> list[ChannelClassification]:
    """Classification for every k in the analytic scan range (plus one margin)."""
    bound = max(k_scan_bound(params), 1) + 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeBoundaryWarning)
        return [classify_channel(params, k, tol) for k in range(-bound, bound + 1) if k != 0]
