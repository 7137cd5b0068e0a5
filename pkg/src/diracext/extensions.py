"""Self-adjoint boundary relations A G+ = B G- and their unitary labels.

A pair (A, B) of d x d matrices gives a self-adjoint realization iff
A B* = B A* and the block matrix [[A, -B], [B, A]] has trivial kernel, which
is equivalent to A A* + B B* being invertible.  Every such relation is also
of the form i (I + U) G+ = (I - U) G- for exactly one unitary U.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .boundary import connection_matrix, uses_second_branch
from ._system import kappa
from .channels import (
    REGIME_TOL,
    IndexSet,
    PotentialParams,
    Regime,
    classify_channel,
    enumerate_index_set,
)
from .errors import (
    CriticalAnomalous,
    DegenerateRelation,
    InvalidParameters,
    NoDeficiency,
    NotUnitary,
    SupNormExceeded,
    ValidationFailed,
)

HERMITIAN_TOL = 1e-10
KERNEL_TOL = 1e-10
UNITARY_TOL = 1e-12
SUBSPACE_TOL = 1e-10
SUP_NORM_TOL = 1e-12


class DistinguishedDiscrepancy(UserWarning):
    """The algebraic case formula disagreed with the A- = 0 / ker M rule."""


@dataclass(frozen=True)
class ExtensionRelation:
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    channel_order: IndexSet | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_matrix, dtype=complex))
        b = np.atleast_2d(np.asarray(self.b_matrix, dtype=complex))
        if a.shape != b.shape or a.shape[0] != a.shape[1]:
            raise InvalidParameters(f"A and B must be square of equal size, got {a.shape} and {b.shape}")
        if self.channel_order is not None and self.channel_order.d != a.shape[0]:
            raise InvalidParameters("matrix size does not match the channel order")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "b_matrix", b)

    @property
    def d(self) -> int:
        return self.a_matrix.shape[0]

    def row(self, i: int) -> tuple[complex, complex]:
        """Per-channel pair (a, b) of a diagonal relation."""
        return complex(self.a_matrix[i, i]), complex(self.b_matrix[i, i])

    def is_diagonal(self) -> bool:
        off = ~np.eye(self.d, dtype=bool)
        return not (np.any(self.a_matrix[off]) or np.any(self.b_matrix[off]))

    def to_dict(self) -> dict:
        def enc(mat):
            return [[[float(z.real), float(z.imag)] for z in row] for row in mat]

        out = {"d": self.d, "A": enc(self.a_matrix), "B": enc(self.b_matrix)}
        if self.channel_order is not None:
            out["channels"] = self.channel_order.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExtensionRelation":
        def dec(rows):
            return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)

        order = IndexSet.from_dict(data["channels"]) if "channels" in data else None
        return cls(dec(data["A"]), dec(data["B"]), order)


@dataclass(frozen=True)
class UnitaryParametrization:
    u_matrix: np.ndarray
    channel_order: IndexSet | None = None

    def __post_init__(self):
        object.__setattr__(self, "u_matrix", np.atleast_2d(np.asarray(self.u_matrix, dtype=complex)))

    @property
    def d(self) -> int:
        return self.u_matrix.shape[0]

    def to_dict(self) -> dict:
        return {"d": self.d, "U": [[[float(z.real), float(z.imag)] for z in row] for row in self.u_matrix]}


@dataclass(frozen=True)
class SelfAdjointCheck:
    ok: bool
    hermitian_defect: float
    kernel_margin: float
    reasons: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok


def check_self_adjoint(rel: ExtensionRelation, tol: float = HERMITIAN_TOL, kernel_tol: float = KERNEL_TOL) -> SelfAdjointCheck:
    a, b = rel.a_matrix, rel.b_matrix
    na, nb = np.linalg.norm(a, 2), np.linalg.norm(b, 2)
    herm = float(np.linalg.norm(a @ b.conj().T - b @ a.conj().T, 2))
    herm_bound = tol * (na * nb + 1.0)
    gram = a @ a.conj().T + b @ b.conj().T
    smin = float(np.linalg.svd(gram, compute_uv=False).min())
    scale = max(na, nb) ** 2
    kernel_bound = kernel_tol * scale if scale > 0 else kernel_tol
    reasons = []
    if herm > herm_bound:
        reasons.append(f"AB* - BA* has norm {herm:.3e} > {herm_bound:.3e}")
    if smin <= kernel_bound:
        reasons.append(f"AA* + BB* is singular (smallest singular value {smin:.3e} <= {kernel_bound:.3e})")
    return SelfAdjointCheck(not reasons, herm, smin - kernel_bound, tuple(reasons))


def _graph_basis(a, b):
    """Orthonormal basis of {(x, y): A x = B y} for a self-adjoint pair."""
    stacked = np.vstack([b.conj().T, a.conj().T])
    q, _ = np.linalg.qr(stacked)
    return q


def _projector(q):
    return q @ q.conj().T


def same_relation(first: ExtensionRelation, second: ExtensionRelation) -> float:
    """Distance between the orthogonal projectors onto the two graphs."""
    p1 = _projector(_graph_basis(first.a_matrix, first.b_matrix))
    p2 = _projector(_graph_basis(second.a_matrix, second.b_matrix))
    return float(np.linalg.norm(p1 - p2, 2))


def relation_to_unitary(rel: ExtensionRelation) -> UnitaryParametrization:
    """U = (A* - i B*)(A* + i B*)^-1, validated against the graph of (A, B)."""
    check = check_self_adjoint(rel)
    if not check:
        raise InvalidParameters("relation is not self-adjoint: " + "; ".join(check.reasons))
    a_h, b_h = rel.a_matrix.conj().T, rel.b_matrix.conj().T
    u = np.linalg.solve((a_h + 1j * b_h).T, (a_h - 1j * b_h).T).T
    up = UnitaryParametrization(u, rel.channel_order)
    dist = same_relation(rel, unitary_to_relation(up, tol=1e-8))
    if dist > SUBSPACE_TOL:
        raise ValidationFailed(f"graph of U differs from graph of (A, B) by {dist:.3e}")
    return up


def unitary_to_relation(up: UnitaryParametrization, tol: float = UNITARY_TOL) -> ExtensionRelation:
    """(A, B) = (i (I + U), I - U)."""
    u = up.u_matrix
    eye = np.eye(up.d)
    defect = max(np.linalg.norm(u.conj().T @ u - eye, 2), np.linalg.norm(u @ u.conj().T - eye, 2))
    if defect > tol:
        raise NotUnitary(f"U*U - I has norm {defect:.3e} > {tol:.1e}")
    return ExtensionRelation(1j * (eye + u), eye - u, up.channel_order)


def _normalize_row(a: complex, b: complex) -> tuple[complex, complex]:
    n = math.hypot(abs(a), abs(b))
    if n == 0:
        raise DegenerateRelation("relation row (0, 0)")
    return a / n, b / n


def _row_defect(row, ray) -> float:
    """|a G+ - b G-| for the unit ray G and the normalized row."""
    a, b = _normalize_row(*row)
    g = np.asarray(ray, dtype=complex)
    g = g / np.linalg.norm(g)
    return abs(a * g[0] - b * g[1])


def _check_distinguished_preconditions(params: PotentialParams) -> None:
    if params.sup_norm > 1.0 + SUP_NORM_TOL:
        raise SupNormExceeded(f"|nu| + sqrt(mu^2 + lambda^2) = {params.sup_norm:.12g} > 1")
    if abs(params.nu) <= SUP_NORM_TOL and abs(params.mu) <= SUP_NORM_TOL and abs(abs(params.lam) - 1.0) <= SUP_NORM_TOL:
        raise CriticalAnomalous("V = +-i alpha.x beta / |x|: the form-domain condition selects no extension")


def distinguished_row(params: PotentialParams, k: int) -> tuple[float, float]:
    """Diagonal entry (a, b) of the distinguished relation on channel k.

    Rows come from the case formulas; each is compared with the ray the
    quadratic form forces (A- = 0, i.e. the first column of D, in the
    subcritical regime; ker M in the critical one) and the ray wins on
    disagreement.
    """
    _check_distinguished_preconditions(params)
    cls = classify_channel(params, k)
    kap, nu, mu, g = kappa(params, k), params.nu, params.mu, cls.gamma
    if cls.regime is Regime.SUBCRITICAL:
        conn = connection_matrix(params, k)
        ray = conn.entries[:, 0].real
        if uses_second_branch(params, k, g):
            row = (kap + g, mu - nu)
        else:
            row = (mu + nu, -(kap - g))
    elif cls.regime is Regime.CRITICAL:
        m_mat = connection_matrix(params, k).entries.real
        # kernel of the rank-one nilpotent M
        _, _, vh = np.linalg.svd(m_mat)
        ray = vh[-1]
        row = (kap, mu - nu)
        if math.hypot(*row) <= REGIME_TOL:
            row = (mu + nu, -kap)
    elif cls.regime is Regime.ESSENTIALLY_SELF_ADJOINT:
        raise InvalidParameters(f"channel k={k} is essentially self-adjoint; it carries no boundary condition")
    else:
        raise SupNormExceeded(f"channel k={k} is supercritical (delta={cls.delta:.3g})")
    if math.hypot(*row) == 0 or _row_defect(row, ray) > 1e-12:
        warnings.warn(
            f"case formula row {row} disagrees with the form-domain ray {tuple(ray)} on k={k}; using the ray",
            DistinguishedDiscrepancy,
            stacklevel=2,
        )
        row = (float(ray[1]), float(ray[0]))
    return float(row[0]), float(row[1])


def distinguished_extension(params: PotentialParams) -> ExtensionRelation:
    _check_distinguished_preconditions(params)
    order = enumerate_index_set(params)
    if order.d == 0:
        raise NoDeficiency("d = 0: the operator is essentially self-adjoint, nothing to select")
    rows = {k: distinguished_row(params, k) for k in {c.k for c in order}}
    a = np.diag([rows[c.k][0] for c in order]).astype(complex)
    b = np.diag([rows[c.k][1] for c in order]).astype(complex)
    rel = ExtensionRelation(a, b, order)
    check = check_self_adjoint(rel)
    if not check:
        raise ValidationFailed("distinguished relation failed the self-adjointness test: " + "; ".join(check.reasons))
    return rel


def theta_row(theta: float) -> tuple[float, float]:
    return math.cos(theta), math.sin(theta)


def theta_family_relation(theta: float, channel_index: int, d: int, params: PotentialParams | None = None) -> ExtensionRelation:
    """Diagonal relation with row (cos theta, sin theta) on one channel.

    The other rows are the distinguished ones when ``params`` is given (then
    ``d`` must equal the deficiency dimension) and G+ = 0 otherwise.
    """
    if not 0 <= channel_index < d:
        raise IndexError(f"channel index {channel_index} out of range for d={d}")
    order = None
    if params is not None:
        base = distinguished_extension(params)
        if base.d != d:
            raise InvalidParameters(f"d={d} does not match the deficiency dimension {base.d}")
        a, b = base.a_matrix.copy(), base.b_matrix.copy()
        order = base.channel_order
    else:
        a, b = np.eye(d, dtype=complex), np.zeros((d, d), dtype=complex)
    a[channel_index, channel_index], b[channel_index, channel_index] = theta_row(theta)
    return ExtensionRelation(a, b, order)
