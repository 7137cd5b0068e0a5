import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from diracext.boundary import connection_matrix
from diracext.channels import PotentialParams, Regime, classify_channel
from diracext.errors import (
    CriticalAnomalous,
    DegenerateRelation,
    InvalidParameters,
    NoDeficiency,
    NotUnitary,
    SupNormExceeded,
)
from diracext.extensions import (
    DistinguishedDiscrepancy,
    ExtensionRelation,
    UnitaryParametrization,
    check_self_adjoint,
    distinguished_extension,
    distinguished_row,
    relation_to_unitary,
    same_relation,
    theta_family_relation,
    unitary_to_relation,
)

from conftest import admissible_params


def random_unitary(rng, d):
    if d == 1:
        return np.array([[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
    return unitary_group.rvs(d, random_state=rng)


@pytest.mark.parametrize("a,b,u", [(1, 0, 1), (0, 1, -1), (1, 1, -1j)])
def test_cayley_scalar_cases(a, b, u):
    got = relation_to_unitary(ExtensionRelation([[a]], [[b]])).u_matrix[0, 0]
    assert abs(got - u) <= 1e-12


def test_identity_cases_matrix():
    eye = np.eye(3)
    np.testing.assert_allclose(relation_to_unitary(ExtensionRelation(eye, 0 * eye)).u_matrix, eye, atol=1e-12)
    np.testing.assert_allclose(relation_to_unitary(ExtensionRelation(0 * eye, eye)).u_matrix, -eye, atol=1e-12)
    rel = unitary_to_relation(UnitaryParametrization(eye))
    np.testing.assert_allclose(rel.a_matrix, 2j * eye)
    np.testing.assert_allclose(rel.b_matrix, 0 * eye)
    rel = unitary_to_relation(UnitaryParametrization(-eye))
    np.testing.assert_allclose(rel.a_matrix, 0 * eye)
    np.testing.assert_allclose(rel.b_matrix, 2 * eye)


def test_round_trip_random(rng):
    for _ in range(50):
        d = int(rng.integers(1, 7))
        u = random_unitary(rng, d)
        rel = unitary_to_relation(UnitaryParametrization(u))
        assert check_self_adjoint(rel)
        np.testing.assert_allclose(relation_to_unitary(rel).u_matrix, u, atol=1e-10)


def test_graph_invariant_under_left_multiplication(rng):
    # (GA, GB) with G invertible is the same relation
    for _ in range(20):
        d = int(rng.integers(1, 5))
        rel = unitary_to_relation(UnitaryParametrization(random_unitary(rng, d)))
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) + 3 * np.eye(d)
        other = ExtensionRelation(g @ rel.a_matrix, g @ rel.b_matrix)
        assert same_relation(rel, other) < 1e-10
        np.testing.assert_allclose(relation_to_unitary(other).u_matrix, relation_to_unitary(rel).u_matrix, atol=1e-9)


def test_check_self_adjoint_examples():
    assert check_self_adjoint(ExtensionRelation(np.eye(2), np.zeros((2, 2))))
    res = check_self_adjoint(ExtensionRelation(np.zeros((2, 2)), np.zeros((2, 2))))
    assert not res and any("singular" in r for r in res.reasons)
    bad = check_self_adjoint(ExtensionRelation([[1]], [[1j]]))
    assert not bad and bad.hermitian_defect > 0


def test_not_unitary():
    with pytest.raises(NotUnitary):
        unitary_to_relation(UnitaryParametrization([[2.0]]))


def test_relation_to_unitary_rejects_non_self_adjoint():
    with pytest.raises(InvalidParameters):
        relation_to_unitary(ExtensionRelation([[1]], [[1j]]))


def test_shape_validation():
    with pytest.raises(InvalidParameters):
        ExtensionRelation(np.eye(2), np.eye(3))


def test_json_round_trip():
    rel = distinguished_extension(PotentialParams(0.95, 0, 0))
    back = ExtensionRelation.from_dict(rel.to_dict())
    np.testing.assert_array_equal(back.a_matrix, rel.a_matrix)
    assert back.channel_order == rel.channel_order


def test_distinguished_coulomb_ratio():
    # Gamma-/Gamma+ on k = 1 for attractive nu = -0.95
    nu = 0.95
    g = math.sqrt(1 - nu * nu)
    a, b = distinguished_row(PotentialParams(-nu, 0, 0), 1)
    assert a / b == pytest.approx((1 + g) / nu, rel=1e-14)
    assert a / b == pytest.approx(1.381316, abs=1e-6)


def _ray_defect(row, ray):
    a, b = row
    ray = np.asarray(ray) / np.linalg.norm(ray)
    return abs(a * ray[0] - b * ray[1]) / math.hypot(a, b)


@pytest.mark.parametrize("k", [1, -1])
def test_distinguished_ray_is_first_column_of_d(k):
    p = PotentialParams(-0.95, 0, 0)
    row = distinguished_row(p, k)
    assert _ray_defect(row, connection_matrix(p, k).entries[:, 0].real) <= 1e-12


def test_distinguished_critical_spans_kernel():
    p = PotentialParams(1, 0, 0)
    a, b = distinguished_row(p, -1)
    assert a == pytest.approx(b)  # Gamma+ = Gamma-
    for k in (1, -1):
        q = PotentialParams(-1, 0, 0)
        m = connection_matrix(q, k).entries.real
        a, b = distinguished_row(q, k)
        np.testing.assert_allclose(m @ np.array([b, a]), 0, atol=1e-14)


def test_distinguished_rows_match_ray_on_sweep(rng):
    with warnings.catch_warnings():
        warnings.simplefilter("error", DistinguishedDiscrepancy)
        for p in admissible_params(rng, 300):
            if abs(p.nu) < 1e-3 and abs(p.mu) < 1e-3:
                continue
            try:
                rel = distinguished_extension(p)
            except NoDeficiency:
                continue
            assert rel.is_diagonal()
            assert np.all(rel.a_matrix.imag == 0) and np.all(rel.b_matrix.imag == 0)
            np.testing.assert_array_equal(rel.a_matrix @ rel.b_matrix.conj().T, rel.b_matrix @ rel.a_matrix.conj().T)
            for i, ch in enumerate(rel.channel_order):
                a, b = rel.row(i)
                cls = classify_channel(p, ch.k)
                assert abs(a) ** 2 + abs(b) ** 2 > 0
                if cls.regime is Regime.SUBCRITICAL:
                    d = connection_matrix(p, ch.k)
                    assert _ray_defect((a.real, b.real), d.entries[:, 0].real) <= 1e-10
                    if d.branch == 2:
                        assert a.real**2 + b.real**2 >= 4 * cls.gamma**2 * (1 - 1e-12)


def test_branch_two_row():
    p = PotentialParams(0.2, 0.2, -0.7)
    a, b = distinguished_row(p, 1)
    assert (a, b) == pytest.approx((0.6, 0.0))
    assert distinguished_extension(p).d == 2


def test_distinguished_errors():
    with pytest.raises(CriticalAnomalous):
        distinguished_extension(PotentialParams(0, 0, 1))
    with pytest.raises(CriticalAnomalous):
        distinguished_extension(PotentialParams(0, 0, -1))
    with pytest.raises(SupNormExceeded):
        distinguished_extension(PotentialParams(1.01, 0, 0))
    with pytest.raises(NoDeficiency):
        distinguished_extension(PotentialParams(0.3, 0, 0))


def test_distinguished_passes_self_adjoint_check():
    assert check_self_adjoint(distinguished_extension(PotentialParams(0.95, 0, 0)))


@pytest.mark.parametrize("theta,row", [(0, (1, 0)), (math.pi / 2, (0, 1)), (math.pi / 4, (math.sqrt(0.5), math.sqrt(0.5)))])
def test_theta_family(theta, row):
    rel = theta_family_relation(theta, 1, 3)
    np.testing.assert_allclose(rel.row(1), row, atol=1e-15)
    assert rel.row(0) == (1, 0)
    assert check_self_adjoint(rel)


def test_theta_family_with_distinguished_rows():
    p = PotentialParams(-0.95, 0, 0)
    rel = theta_family_relation(1.0, 2, 4, p)
    base = distinguished_extension(p)
    assert rel.row(0) == base.row(0)
    np.testing.assert_allclose(rel.row(2), (math.cos(1.0), math.sin(1.0)))
    with pytest.raises(IndexError):
        theta_family_relation(0.0, 4, 4)
    with pytest.raises(InvalidParameters):
        theta_family_relation(0.0, 0, 3, p)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_cayley_unitary_and_same_graph(d, seed):
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = h + h.conj().T
    # A = I, B = H is self-adjoint for Hermitian H
    rel = ExtensionRelation(np.eye(d), h)
    up = relation_to_unitary(rel)
    np.testing.assert_allclose(up.u_matrix.conj().T @ up.u_matrix, np.eye(d), atol=1e-10)
    assert same_relation(rel, unitary_to_relation(up, tol=1e-10)) < 1e-10
