"""Mod-ell filtrations on Gamma_0(4) via the theta/F monomial basis."""

import random
from fractions import Fraction

import pytest

from qforms.errors import BasisMismatch, InsufficientPrecision, PrincipalPartNonzero, ZeroInput
from qforms.filtration import (filtration, graded_basis, graded_monomials, is_congruent_to_weight,
                               minimal_weight, random_form, rank_mod_p, solve_mod_p,
                               sturm_precision, verify_filtration_props)
from qforms.forms import eisenstein, theta, weight2_F
from qforms.operators import u_op
from qforms.series import QSeries, series_mul, series_pow


def _expand(witness, prec, ell):
    acc = QSeries({}, prec, ell)
    for (a, b), c in witness:
        mono = series_mul(series_pow(theta(prec, ell).series, a), series_pow(weight2_F(prec, ell).series, b))
        acc = acc + mono * c
    return acc


class TestBasis:
    def test_weight_half(self):
        b = graded_basis(1, 20)
        assert len(b) == 1 and b[0] == theta(20).series

    def test_weight_three_halves(self):
        b = graded_basis(3, 20)
        assert len(b) == 1 and b[0] == series_pow(theta(20).series, 3)

    def test_weight_twelve(self):
        assert len(graded_monomials(24)) == 7
        for ell in (5, 7):
            rows = [s.coefficients(0, sturm_precision(24)) for s in graded_basis(24, sturm_precision(24), ell)]
            assert rank_mod_p(rows, ell) == 7

    @pytest.mark.parametrize("ell", [5, 7])
    def test_soundness_up_to_60(self, ell):
        for k2 in range(0, 61):
            p = sturm_precision(k2)
            rows = [s.coefficients(0, p) for s in graded_basis(k2, p, ell)]
            assert len(rows) == k2 // 4 + 1
            assert rank_mod_p(rows, ell) == len(rows), k2

    def test_sturm(self):
        assert sturm_precision(24) == 22
        assert sturm_precision(0) == 16
        assert sturm_precision(1) == 16

    def test_solve(self):
        cols = [[1, 0, 2], [0, 1, 3]]
        assert solve_mod_p(cols, [2, 3, 4 + 9], 5) == [2, 3]
        assert solve_mod_p(cols, [0, 0, 1], 5) is None


class TestMembership:
    def test_theta_e4(self):
        p = sturm_precision(9)
        f = series_mul(theta(p, 5).series, eisenstein(4, p, 5).series)
        assert is_congruent_to_weight(f, 1, 5, k2_f=9) == (((1, 0), 1),)

    def test_theta9_not_weight_half(self):
        f = series_pow(theta(30, 5).series, 9)
        assert is_congruent_to_weight(f, 1, 5) is None
        assert f[1] == 3  # 18 mod 5

    def test_one(self):
        assert is_congruent_to_weight(QSeries.constant(1, 16, 7), 0) == (((0, 0), 1),)

    def test_precision_guard(self):
        with pytest.raises(InsufficientPrecision):
            is_congruent_to_weight(theta(10, 5).series, 1, 5)

    def test_principal_part(self):
        with pytest.raises(PrincipalPartNonzero):
            is_congruent_to_weight(QSeries({-1: 1, 0: 1}, 20, 5), 0)

    def test_exact_input_reduced(self):
        f = series_mul(theta(30).series, eisenstein(4, 30).series)
        assert is_congruent_to_weight(f, 1, 5) == (((1, 0), 1),)


class TestFiltration:
    @pytest.mark.parametrize("ell", [5, 7, 11, 13])
    def test_theta_power(self, ell):
        p = sturm_precision(ell)
        res = filtration(series_pow(theta(p, ell).series, ell), ell, ell)
        assert res.omega2 == ell

    @pytest.mark.parametrize("ell", [5, 7, 11, 13])
    def test_theta_e(self, ell):
        k2 = 2 * ell - 1
        p = sturm_precision(k2)
        f = series_mul(theta(p, ell).series, eisenstein(ell - 1, p, ell).series)
        res = filtration(f, k2, ell)
        assert res.omega2 == 1 and res.omega == Fraction(1, 2)
        assert res.candidate_chain == (1, k2)

    @pytest.mark.parametrize("ell", [5, 7])
    def test_e(self, ell):
        res = filtration(eisenstein(ell - 1, 30, ell).series, 2 * (ell - 1), ell)
        assert res.omega2 == 0

    def test_zero(self):
        with pytest.raises(ZeroInput):
            filtration(QSeries({}, 30, 5), 4)

    def test_insufficient(self):
        with pytest.raises(InsufficientPrecision):
            filtration(theta(5, 5).series, 1)

    def test_not_of_stated_weight(self):
        with pytest.raises(BasisMismatch):
            filtration(series_pow(theta(30, 5).series, 9), 1, 5)

    @pytest.mark.parametrize("ell", [5, 7])
    def test_result_invariants(self, ell):
        rng = random.Random(11)
        for _ in range(40):
            k2 = rng.randrange(0, 40)
            p = sturm_precision(k2 + 4 * (ell - 1))
            f, k2f, _ = random_form(rng, ell, k2, p, lift=rng.randrange(3))
            res = filtration(f, k2f, ell)
            assert (res.omega2 - k2f) % (2 * (ell - 1)) == 0
            assert res.omega2 % 2 == k2f % 2
            assert _expand(res.witness, res.checked_precision, ell) == f

    @pytest.mark.parametrize("ell", [5, 7])
    def test_precision_regression(self, ell):
        rng = random.Random(2024 + ell)
        for _ in range(100):
            k2 = rng.randrange(0, 30)
            lift = rng.randrange(3)
            top = k2 + 2 * lift * (ell - 1)
            p = sturm_precision(top)
            state = rng.getstate()
            f, k2f, _ = random_form(rng, ell, k2, p, lift)
            rng.setstate(state)
            g, _, _ = random_form(rng, ell, k2, p + 50, lift)
            assert filtration(f, k2f, ell).omega2 == filtration(g, k2f, ell).omega2

    def test_to_dict(self):
        d = filtration(series_mul(theta(30, 5).series, eisenstein(4, 30, 5).series), 9, 5).to_dict()
        assert d["omega"] == "1/2" and d["witness"] == [{"theta": 1, "F": 0, "coefficient": 1}]


class TestLaws:
    @pytest.mark.parametrize("ell", [5, 7])
    def test_all_laws(self, ell):
        rep = verify_filtration_props(ell, sample_count=100, seed=0)
        assert rep["pass"], {k: v["failures"][:1] for k, v in rep["laws"].items() if not v["pass"]}
        for law in ("theta_shift", "power", "u_congruence", "weight_congruence", "u_bound", "descent"):
            assert rep["laws"][law]["checked"] >= 100
            assert rep["laws"][law]["failed"] == 0

    def test_theta_times_theta_squared(self):
        p = sturm_precision(3)
        assert filtration(series_pow(theta(p, 5).series, 3), 3, 5).omega == Fraction(3, 2)

    def test_u_bound_and_descent_weight_twelve(self):
        rng = random.Random(7)
        ell, found = 5, 0
        while found < 5:
            f, _, _ = random_form(rng, ell, 24, ell * sturm_precision(24))
            w = filtration(f, 24, ell)
            if w.omega2 != 24:
                continue
            found += 1
            wu = filtration(u_op(f, ell), 24, ell)
            assert Fraction(wu.omega2, 2) <= ell + (w.omega - 1) / ell
            assert wu.omega < w.omega  # 12 > ell + 1

    def test_minimal_weight_scans_everything(self):
        p = sturm_precision(12)
        f = series_pow(theta(p, 5).series, 3)
        assert minimal_weight(f, 11, 5).omega2 == 3
