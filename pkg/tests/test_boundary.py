import math
from types import SimpleNamespace

import numpy as np
import pytest

from diracext.boundary import (
    BoundaryData,
    MaximalDomainFunction,
    asymptotic_model,
    boundary_data_from_coeffs,
    boundary_form,
    connection_matrix,
    extract_boundary_data,
    green_pairing,
    solution_basis,
    wronskian_determinant,
    wronskian_limit,
)
from diracext.channels import PotentialParams, Regime
from diracext.errors import ChannelMismatch, EssentiallySelfAdjointChannel, IllConditionedFit, NonConvergent

from conftest import admissible_params

COULOMB = PotentialParams(0.95, 0, 0)
CRITICAL = PotentialParams(1, 0, 0)
SUPER = PotentialParams(1.2, 0, 0)


def samples(params, k, coeffs, lo=1e-8, hi=1e-5, n=60, energy=None):
    r = np.geomspace(lo, hi, n)
    vals = solution_basis(params, k, r, energy) @ np.asarray(coeffs, dtype=complex)
    return SimpleNamespace(k=k, grid=r, values=vals, energy=energy)


def test_critical_matrix_example():
    m = connection_matrix(CRITICAL, -1)
    np.testing.assert_array_equal(m.entries.real, [[1, -1], [1, -1]])
    np.testing.assert_array_equal(m.entries @ m.entries, np.zeros((2, 2)))


def test_subcritical_matrix_example():
    g = math.sqrt(0.0975)
    d = connection_matrix(COULOMB, 1)
    want = np.array([[1 - g, 0.95], [-0.95, -(1 - g)]]) / (2 * g * (1 - g))
    np.testing.assert_allclose(d.entries.real, want, rtol=1e-14)
    assert d.det.real == pytest.approx(1 / (2 * g * (1 - g)), rel=1e-12)


def test_second_branch():
    p = PotentialParams(0.2, 0.2, -0.7)
    d = connection_matrix(p, 1)
    assert d.branch == 2
    g = d.gamma
    assert d.det.real == pytest.approx(-1 / (4 * g * g), rel=1e-12)


def test_connection_matrix_rejects_esa():
    with pytest.raises(EssentiallySelfAdjointChannel):
        connection_matrix(PotentialParams(0, 0, 0), 1)


def test_supercritical_invertible():
    e = connection_matrix(SUPER, 1)
    assert abs(e.det) > 0
    assert e.regime is Regime.SUPERCRITICAL


def test_model_examples():
    np.testing.assert_array_equal(asymptotic_model(COULOMB, 1, (0, 0), 0.3), [0, 0])
    np.testing.assert_allclose(asymptotic_model(CRITICAL, -1, (1, 0), 1.0), [1, 0])
    g = math.sqrt(0.0975)
    d = connection_matrix(COULOMB, 1).entries
    np.testing.assert_allclose(asymptotic_model(COULOMB, 1, (1, 0), 0.01), d[:, 0] * 0.01**g, rtol=1e-14)


@pytest.mark.parametrize("params,k", [(COULOMB, 1), (COULOMB, -1), (CRITICAL, -1), (SUPER, 1), (SUPER, -1)])
def test_extraction_round_trip(params, k):
    bd = extract_boundary_data(samples(params, k, (2, -1)), params, k, use_energy=False)
    np.testing.assert_allclose(bd.coeffs, (2, -1), atol=1e-10)
    assert bd.fit_residual < 1e-12


def test_extraction_with_energy_uses_exact_basis():
    s = samples(COULOMB, 1, (0.3, 1.2), lo=1e-8, hi=1e-3, energy=0.4)
    bd = extract_boundary_data(s, COULOMB, 1, window=(1e-8, 1e-3))
    np.testing.assert_allclose(bd.coeffs, (0.3, 1.2), atol=1e-12)


def test_extraction_perturbation_bound():
    # a perturbation c r^0.6 biases the two-term fit by about r_hi^(0.6 - gamma)
    g = math.sqrt(0.0975)
    s = samples(COULOMB, 1, (2, -1))
    s.values = s.values + 0.5 * s.grid[:, None] ** 0.6
    bd = extract_boundary_data(s, COULOMB, 1, use_energy=False)
    bound = 10 * 1e-5 ** (0.6 - g)
    assert abs(bd.coeffs[0] - 2) < bound
    assert abs(bd.coeffs[1] + 1) < 1e-6


def test_extraction_of_smooth_function_has_no_singular_part():
    r = np.geomspace(1e-8, 1e-5, 50)
    s = SimpleNamespace(k=1, grid=r, values=np.stack([r, 0.3 * r], axis=1), energy=None)
    bd = extract_boundary_data(s, COULOMB, 1)
    assert abs(bd.coeffs[1]) < 1e-6
    assert abs(bd.coeffs[0]) < 1e-2


def test_extraction_channel_mismatch():
    with pytest.raises(ChannelMismatch):
        extract_boundary_data(samples(COULOMB, 1, (1, 1)), COULOMB, -1)


def test_ill_conditioned_fit():
    p = PotentialParams(0.999999, 0, 0)  # gamma ~ 1.4e-3: r^g and r^-g nearly collinear
    with pytest.raises(IllConditionedFit):
        extract_boundary_data(samples(p, 1, (1, 1), lo=1e-6, hi=1e-5), p, 1, use_energy=False, cond_max=1e2)


def test_boundary_form_examples():
    one = BoundaryData(1, 1, 1, (0, 0))
    assert boundary_form(one, one) == 0
    assert boundary_form(BoundaryData(1, 1, 0, (0, 0)), BoundaryData(1, 0, 1, (0, 0))) == 1
    with pytest.raises(ChannelMismatch):
        boundary_form(BoundaryData(1, 1, 0, (0, 0)), BoundaryData(-1, 0, 1, (0, 0)))


def test_boundary_data_json():
    bd = boundary_data_from_coeffs(SUPER, 1, (1 + 1j, 2))
    d = bd.to_dict()
    assert d["gamma_plus"] == [bd.gamma_plus.real, bd.gamma_plus.imag]
    assert connection_matrix(SUPER, 1).to_dict()["regime"] == "supercritical"


@pytest.mark.parametrize("params,k", [(COULOMB, 1), (CRITICAL, -1), (SUPER, 1)])
def test_wronskian_of_models_equals_boundary_form(params, k):
    cf, cg = (1, 0), (0, 1)
    f = samples(params, k, cf, lo=1e-9, hi=1e-3, n=400)
    g = samples(params, k, cg, lo=1e-9, hi=1e-3, n=400)
    want = boundary_form(boundary_data_from_coeffs(params, k, cf), boundary_data_from_coeffs(params, k, cg))
    got = wronskian_limit(f, g, params=params)
    assert abs(got - want) <= 1e-8 * max(1, abs(want))


def test_wronskian_of_real_solutions_is_real():
    f = samples(COULOMB, 1, (1, 2), lo=1e-9, hi=1e-3, n=400, energy=0.3)
    g = samples(COULOMB, 1, (-0.5, 1), lo=1e-9, hi=1e-3, n=400, energy=0.3)
    assert abs(wronskian_limit(f, g, params=COULOMB).imag) < 1e-14


def test_wronskian_at_equal_energy_is_boundary_form():
    # same energy: the determinant is constant in r, so the limit is exact
    cf, cg = (1.5, -0.4), (0.2, 0.9)
    f = samples(COULOMB, -1, cf, lo=1e-9, hi=0.5, n=500, energy=0.6)
    g = samples(COULOMB, -1, cg, lo=1e-9, hi=0.5, n=500, energy=0.6)
    d = wronskian_determinant(f.values, g.values)
    want = boundary_form(boundary_data_from_coeffs(COULOMB, -1, cf), boundary_data_from_coeffs(COULOMB, -1, cg))
    np.testing.assert_allclose(d, want, rtol=1e-10)
    assert abs(wronskian_limit(f, g, params=COULOMB) - want) < 1e-8


def test_wronskian_vanishes_for_compact_support():
    r = np.geomspace(1e-9, 1e-3, 100)
    f = SimpleNamespace(k=1, grid=r, values=np.zeros((100, 2)))
    g = samples(COULOMB, 1, (1, 1), lo=1e-9, hi=1e-3, n=100)
    assert wronskian_limit(f, g) == 0


def test_wronskian_nonconvergent_outside_maximal_domain():
    r = np.geomspace(1e-9, 1e-3, 400)
    f = SimpleNamespace(k=1, grid=r, values=np.stack([r**-0.8, r**-0.8], axis=1))
    g = SimpleNamespace(k=1, grid=r, values=np.stack([r**-0.7, -(r**-0.7)], axis=1))
    with pytest.raises(NonConvergent):
        wronskian_limit(f, g, params=COULOMB)


@pytest.mark.parametrize("params,k", [(COULOMB, 1), (PotentialParams(0.4, 0.1, 0.7), -1), (CRITICAL, -1), (SUPER, -1)])
def test_green_identity(params, k, rng):
    for _ in range(3):
        cf = rng.normal(size=2) + 1j * rng.normal(size=2)
        cg = rng.normal(size=2) + 1j * rng.normal(size=2)
        pf = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        pg = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        f = MaximalDomainFunction(params, k, cf, pf)
        g = MaximalDomainFunction(params, k, cg, pg)
        res = green_pairing(f, f.apply_maximal, g, g.apply_maximal)
        want = boundary_form(f.boundary, g.boundary)
        assert abs(res.value - want) <= 1e-6 * max(1.0, abs(want))


def test_determinant_identities_sweep(rng):
    for p in admissible_params(rng, 200):
        for k in (-2, -1, 1, 2):
            from diracext.channels import classify_channel

            cls = classify_channel(p, k)
            if not cls.regime.has_boundary_data:
                continue
            c = connection_matrix(p, k)
            if c.regime is Regime.CRITICAL:
                assert np.abs(c.entries @ c.entries).max() <= 1e-14
            elif c.branch == 1:
                want = 1 / (2 * c.gamma * (p.lam + k - c.gamma))
                assert abs(c.det - want) <= 1e-12 * abs(want)
