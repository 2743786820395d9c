"""Correlation functions, Bell correlation routes, string order, energies and CSV output."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spin1bell.criticality import power_law_fit
from spin1bell.ed import aklt_exact_imps
from spin1bell.imps import product_state, random_imps
from spin1bell.mpo import aklt_hamiltonian_mpo, bell_two_point_mpo, xxz_d_hamiltonian_mpo
from spin1bell.observables import (
    CorrelationSeries,
    bell_correlation,
    bell_series,
    bound_check,
    c1,
    c1_series,
    c2,
    c2_series,
    correlation_series,
    energy_per_site,
    magnetization,
    mpo_window_expectation,
    one_point,
    read_series_csv,
    string_order,
    two_point,
    write_series_csv,
)
from spin1bell.spin_algebra import spin1_ladder, spin1_sz, spin_flip

PLUS = np.array([1.0, 0.0, 0.0])
ZERO = np.array([0.0, 1.0, 0.0])


class TestProductStates:
    @pytest.mark.parametrize("r", [1, 2, 5])
    def test_szsz(self, r):
        sz = spin1_sz()
        assert two_point(product_state(3, ZERO), sz, sz, r) == pytest.approx(0.0)
        assert two_point(product_state(3, PLUS), sz, sz, r) == pytest.approx(1.0)

    def test_transverse_correlations_vanish(self):
        for s in (product_state(3, ZERO), product_state(3, PLUS)):
            for r in (1, 3):
                assert c1(s, r) == pytest.approx(0.0, abs=1e-15)
                assert c2(s, r) == pytest.approx(0.0, abs=1e-15)

    def test_ferromagnet_bell_is_zero(self):
        s = product_state(3, PLUS)
        assert bell_correlation(s, 1) == pytest.approx(0.0, abs=1e-15)
        assert bell_correlation(s, 4, "decomposition") == pytest.approx(0.0, abs=1e-15)

    def test_string_order_zero_state(self):
        assert string_order(product_state(3, ZERO), 5) == pytest.approx(0.0)

    def test_magnetization(self):
        assert magnetization(product_state(3, PLUS)) == pytest.approx((1.0, 1.0))

    def test_distance_checked(self):
        s = product_state(3, ZERO)
        with pytest.raises(ValueError):
            bell_correlation(s, 0)
        with pytest.raises(ValueError):
            string_order(s, 1)
        with pytest.raises(ValueError):
            bell_correlation(s, 1, method="fourier")


@pytest.fixture(scope="module")
def aklt():
    return aklt_exact_imps()


class TestAKLT:
    @pytest.mark.parametrize("r", [1, 2, 3, 4, 7])
    def test_transverse_correlation_closed_form(self, aklt, r):
        # <S^x S^x> + <S^y S^y> = 2 <S^z S^z> = (8/3)(-1/3)^r
        assert c1(aklt, r) == pytest.approx((8.0 / 3.0) * (-1.0 / 3.0) ** r, abs=1e-13)

    def test_c1_alternates_and_decays_with_length_1_over_ln3(self, aklt):
        vals = c1_series(aklt, range(1, 12))
        ratios = [vals[r + 1] / vals[r] for r in range(1, 11)]
        assert np.allclose(ratios, -1.0 / 3.0, atol=1e-10)
        assert -1.0 / math.log(1.0 / 3.0) == pytest.approx(1.0 / math.log(3.0))

    def test_no_double_spin_flip_correlation(self, aklt):
        # (S^+)^2 changes S^z by two, which the AKLT bond projectors never transmit
        assert all(abs(v) < 1e-14 for v in c2_series(aklt, range(1, 6)).values())

    @pytest.mark.parametrize("r", [2, 3, 10, 50])
    def test_string_order(self, aklt, r):
        assert string_order(aklt, r) == pytest.approx(-4.0 / 9.0, abs=1e-12)

    def test_energy(self, aklt):
        assert energy_per_site(aklt, aklt_hamiltonian_mpo()) == pytest.approx(-2.0 / 3.0, abs=1e-12)

    def test_bell_equals_scaled_c1(self, aklt):
        for r in (1, 2, 3):
            assert bell_correlation(aklt, r) == pytest.approx(2.0 * c1(aklt, r) / math.sqrt(3.0),
                                                              abs=1e-13)


class TestBellRoutes:
    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10_000), r=st.integers(1, 6), cplx=st.booleans())
    def test_mpo_matches_decomposition_on_random_states(self, seed, r, cplx):
        s = random_imps(8, rng=np.random.default_rng(seed), complex_entries=cplx)
        assert bell_correlation(s, r, "mpo") == pytest.approx(
            bell_correlation(s, r, "decomposition"), abs=1e-10)

    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_series_matches_generic_window_contraction(self, r):
        s = random_imps(6, rng=np.random.default_rng(r))
        window = mpo_window_expectation(s, bell_two_point_mpo(r))
        assert abs(window.imag) < 1e-12
        assert bell_series(s, [r])[r] == pytest.approx(window.real, abs=1e-12)
        shifted = mpo_window_expectation(s.shifted(), bell_two_point_mpo(r))
        assert bell_correlation(s.shifted(), r) == pytest.approx(shifted.real, abs=1e-12)

    def test_series_equals_single_distance_calls(self):
        s = random_imps(5, rng=np.random.default_rng(3))
        series = bell_series(s, [1, 4, 9])
        for r in (1, 4, 9):
            assert series[r] == pytest.approx(bell_correlation(s, r), abs=1e-13)


class TestFlipInvariance:
    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_observables_unchanged_by_global_flip(self, seed):
        s = random_imps(5, rng=np.random.default_rng(seed), complex_entries=True)
        f = s.apply_site_unitary(spin_flip())
        for r in (1, 2, 5):
            assert c1(f, r) == pytest.approx(c1(s, r), abs=1e-12)
            assert c2(f, r) == pytest.approx(c2(s, r), abs=1e-12)
            assert bell_correlation(f, r) == pytest.approx(bell_correlation(s, r), abs=1e-12)
        assert string_order(f, 4) == pytest.approx(string_order(s, 4), abs=1e-12)

    def test_flip_reverses_magnetization(self):
        s = product_state(3, PLUS).apply_site_unitary(spin_flip())
        assert magnetization(s) == pytest.approx((-1.0, -1.0))


class TestGroundStates:
    def test_orderings_agree_on_ground_state(self, heisenberg30):
        s = heisenberg30.state
        for r in (1, 2, 7):
            assert c1(s, r, check_orderings=True) == pytest.approx(c1(s, r))
            c2(s, r, check_orderings=True)

    def test_heisenberg_string_order(self, heisenberg30):
        so = string_order(heisenberg30.state, 40)
        assert abs(so) > 0.2
        assert so == pytest.approx(-0.3743, abs=1e-3)

    def test_heisenberg_bell_routes(self, heisenberg30):
        s = heisenberg30.state
        for r in (1, 2, 11):
            assert bell_correlation(s, r) == pytest.approx(bell_correlation(s, r, "decomposition"),
                                                           abs=1e-10)

    def test_engine_and_state_energies_agree(self, heisenberg30):
        h = xxz_d_hamiltonian_mpo(1.0, 1.0, 0.0)
        assert energy_per_site(heisenberg30.state, h) == pytest.approx(
            heisenberg30.energy_per_site, abs=1e-5)

    def test_antiferromagnet_bell_decays(self, antiferro30):
        s = antiferro30.state
        vals = np.abs([bell_correlation(s, r) for r in range(3, 41)])
        assert np.all(np.diff(vals) < 0)
        assert vals[-1] < 1e-4

    def test_xy_phase_power_law(self, xy20):
        s = xy20.state
        rs = list(range(11, 82, 2))
        c1v, c2v = c1_series(s, rs), c2_series(s, rs)
        assert all(abs(c1v[r]) > abs(c2v[r]) for r in rs)
        fit = power_law_fit(rs, [c1v[r] for r in rs])
        assert fit.converged
        assert fit.eta > 0
        # no U(1) breaking at finite bond dimension
        assert abs(one_point(s, spin1_ladder()[0])) < 1e-10
        assert abs(c1v[81]) < abs(c1v[11])


class TestBounds:
    @pytest.mark.parametrize("value,label", [
        (0.0, "ok"), (2.0, "ok"), (-4.0, "ok"),
        (2.0000001, "violation-upper"), (-4.0000001, "violation-lower"),
    ])
    def test_labels(self, value, label):
        chk = bound_check(value)
        assert chk.label == label
        assert chk.ok == (label == "ok")


class TestSeriesCSV:
    def test_round_trip(self, tmp_path):
        s = random_imps(4, rng=np.random.default_rng(0))
        series = [correlation_series(s, kind, [2, 3, 5], Jz=0.5, D=-0.25, chi=4)
                  for kind in CorrelationSeries.KINDS]
        path = tmp_path / "series.csv"
        write_series_csv(path, series, {"seed": 0})
        back = {x.kind: x for x in read_series_csv(path)}
        assert set(back) == set(CorrelationSeries.KINDS)
        for orig in series:
            got = back[orig.kind]
            assert got.distances == orig.distances
            assert np.allclose(got.values, orig.values, rtol=1e-11, atol=1e-14)
            assert (got.Jz, got.D, got.chi) == (0.5, -0.25, 4)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            CorrelationSeries("Bogus", [1], [0.0])
