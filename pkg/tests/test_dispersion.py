import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bose_mi.dispersion import (
    HoppingKind,
    HoppingModel,
    dispersion_at,
    dispersion_gap_thermo_limit,
    dispersion_table,
    dispersion_thermo_limit,
    small_k_expansion,
)
from bose_mi.errors import DomainError, ModeIndexError


def test_model_validation():
    with pytest.raises(DomainError):
        HoppingModel.nearest_neighbor(1)
    with pytest.raises(DomainError):
        HoppingModel.nearest_neighbor(8, t=0.0)
    with pytest.raises(DomainError):
        HoppingModel.power_law(1.0, 8)
    with pytest.raises(DomainError):
        HoppingModel.power_law(0.9, 8)
    with pytest.raises(DomainError):
        HoppingModel("powerlaw", 8)
    with pytest.raises(DomainError):
        HoppingModel("ladder", 8)
    m = HoppingModel("infinite", 8, 1.0, 3.0)
    assert m.kind is HoppingKind.INFINITE_RANGE and m.gamma is None


def test_infinite_range_levels():
    assert dispersion_at(HoppingModel.infinite_range(37), 0) == -1.0
    assert dispersion_at(HoppingModel.infinite_range(64), 3) == 0.0
    assert list(dispersion_table(HoppingModel.infinite_range(4)).eps) == [-1.0, 0.0, 0.0, 0.0]


def test_nearest_neighbor_levels():
    assert dispersion_at(HoppingModel.nearest_neighbor(4), 1) == pytest.approx(0.0, abs=1e-15)
    eps = dispersion_table(HoppingModel.nearest_neighbor(2)).eps
    assert eps[0] == pytest.approx(-2.0) and eps[1] == pytest.approx(2.0)


def test_power_law_table_matches_direct_sum():
    tab = dispersion_table(HoppingModel.power_law(1.7, 256))
    ref = -2.0 * math.fsum(n**-1.7 for n in range(1, 256))
    assert tab.eps[0] == pytest.approx(ref, rel=1e-13)
    for m in (1, 17, 128, 200):
        assert tab.eps[m] == pytest.approx(dispersion_at(HoppingModel.power_law(1.7, 256), m), rel=1e-12, abs=1e-12)


def test_mode_index_checked():
    model = HoppingModel.nearest_neighbor(8)
    for m in (-1, 8, 2.5):
        with pytest.raises(ModeIndexError):
            dispersion_at(model, m)


def test_table_is_read_only():
    tab = dispersion_table(HoppingModel.power_law(1.5, 16))
    with pytest.raises(ValueError):
        tab.eps[0] = 0.0


models = st.one_of(
    st.builds(HoppingModel.nearest_neighbor, st.integers(2, 300), st.floats(0.1, 5)),
    st.builds(HoppingModel.infinite_range, st.integers(2, 300), st.floats(0.1, 5)),
    st.builds(lambda g, L, t: HoppingModel.power_law(g, L, t), st.floats(1.05, 5), st.integers(2, 300), st.floats(0.1, 5)),
)


@given(models, st.data())
def test_evenness_and_minimum(model, data):
    tab = dispersion_table(model)
    assert np.array_equal(tab.eps[1:], tab.eps[1:][::-1])
    assert tab.eps.argmin() == 0
    if model.kind is not HoppingKind.INFINITE_RANGE:
        assert np.all(tab.eps[1:] > tab.eps[0])
    m = data.draw(st.integers(0, model.L - 1))
    assert dispersion_at(model, m) == pytest.approx(dispersion_at(model, (model.L - m) % model.L), abs=1e-12)


def test_thermo_limit_origin_and_zone_boundary():
    assert dispersion_thermo_limit(2.0, 1.0, 0.0) == pytest.approx(-math.pi**2 / 3, rel=1e-14)
    # k = pi: -2 sum (-1)^n / n^1.7 = 2 eta(1.7)
    eta = float(mpmath.altzeta(1.7))
    assert dispersion_thermo_limit(1.7, 1.0, math.pi) == pytest.approx(2 * eta, rel=1e-12)
    terms = [(-1) ** (n + 1) / n**1.7 for n in range(1, 200001)]
    assert dispersion_thermo_limit(1.7, 1.0, math.pi) == pytest.approx(2 * math.fsum(terms), rel=1e-8)


@pytest.mark.parametrize("gamma", [1.3, 2.0, 2.5, 3.0, 4.2])
def test_thermo_limit_against_mpmath(gamma):
    k = np.array([1e-3, 0.05, 0.5, 1.5, 2.9, 4.0, 6.0])
    got = dispersion_thermo_limit(gamma, 2.0, k)
    ref = [-4.0 * float(mpmath.re(mpmath.polylog(gamma, mpmath.exp(1j * x)))) for x in k]
    np.testing.assert_allclose(got, ref, rtol=1e-10)
    assert dispersion_thermo_limit(gamma, 1.0, 0.7) == pytest.approx(dispersion_thermo_limit(gamma, 1.0, -0.7))


def test_thermo_limit_rejects_gamma_le_one():
    with pytest.raises(DomainError):
        dispersion_thermo_limit(1.0, 1.0, 0.3)


def test_gap_matches_difference():
    k = np.linspace(0.2, math.pi, 9)
    for g in (1.5, 2.0, 3.7):
        diff = dispersion_thermo_limit(g, 1.0, k) - dispersion_thermo_limit(g, 1.0, 0.0)
        np.testing.assert_allclose(dispersion_gap_thermo_limit(g, 1.0, k), diff, rtol=1e-11)


def test_small_k_sigma_values():
    a = small_k_expansion(1.5)
    assert a.exponent == 0.5
    assert a.sigma == pytest.approx(4 * math.sqrt(math.pi), rel=1e-14)
    b = small_k_expansion(2.5)
    assert b.exponent == 1.5
    assert b.sigma == pytest.approx(-8 * math.sqrt(math.pi) / 3, rel=1e-14)
    assert len(a.zeta_terms) == 3


def test_small_k_prefactor_controls_leading_term():
    # sigma alone misses cos(pi (gamma - 1) / 2); the prefactor carries it
    a = small_k_expansion(1.5)
    k = 0.01
    d = dispersion_gap_thermo_limit(1.5, 1.0, k)
    assert d == pytest.approx(a.prefactor * k**0.5, rel=1e-2)
    assert a.prefactor == pytest.approx(a.sigma * math.cos(math.pi / 4), rel=1e-15)
    assert small_k_expansion(2.5).prefactor > 0


def test_small_k_expansion_with_analytic_terms():
    a = small_k_expansion(1.7)
    k = 1e-3
    exact = dispersion_gap_thermo_limit(1.7, 1.0, k)
    hp = -2 * float(mpmath.re(mpmath.polylog(1.7, mpmath.exp(1j * k)) - mpmath.zeta(1.7)))
    assert exact == pytest.approx(hp, rel=1e-10)
    assert a.energy_shift(k) == pytest.approx(exact, rel=1e-4)


@pytest.mark.parametrize("gamma", [1.0, 2.0, 3.0, 3.5])
def test_small_k_expansion_domain(gamma):
    with pytest.raises(DomainError):
        small_k_expansion(gamma)


@pytest.mark.parametrize("gamma,expected", [(1.3, 0.3), (1.5, 0.5), (1.7, 0.7), (2.5, 1.5), (3.5, 2.0), (4.5, 2.0)])
def test_small_k_exponent_recovery(gamma, expected):
    k = np.logspace(-4, -2, 21)
    slope = np.polyfit(np.log(k), np.log(dispersion_gap_thermo_limit(gamma, 1.0, k)), 1)[0]
    assert slope == pytest.approx(expected, rel=0.02)


@pytest.mark.parametrize("frac", [0.125, 0.25, 0.5])
def test_finite_size_converges_monotonically(frac):
    errs = []
    for p in range(8, 15):
        L = 2**p
        m = int(frac * L)
        e = dispersion_table(HoppingModel.power_law(1.7, L)).eps[m]
        errs.append(abs(e - dispersion_thermo_limit(1.7, 1.0, 2 * math.pi * m / L)))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_thermo_limit_table_flag():
    model = HoppingModel.power_law(1.7, 64)
    tab = dispersion_table(model, thermo_limit=True)
    np.testing.assert_allclose(tab.eps, dispersion_thermo_limit(1.7, 1.0, tab.k), rtol=1e-14)
    # other kinds ignore the flag
    nn = HoppingModel.nearest_neighbor(16)
    assert np.array_equal(dispersion_table(nn, True).eps, dispersion_table(nn).eps)
