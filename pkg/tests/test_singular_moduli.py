"""Reduced forms, CM values of j and traces of singular moduli."""

import random

import pytest

from qforms import singular_moduli as sm
from qforms.errors import BadDiscriminant, CrossCheckFailed, RoundingGuard
from qforms.forms import zagier_trace_form
from qforms.singular_moduli import (ReducedForm, omega_q, reduce_form, reduced_forms,
                                    trace_oracle, trace_singular_moduli, trace_table)

VALID = [d for d in range(3, 301) if d % 4 in (0, 3)]


def _brute_class_reps(d):
    # every reduced form satisfies a <= sqrt(d/3); list them exhaustively
    out = set()
    for a in range(1, 200):
        for b in range(-a, a + 1):
            if (b * b + d) % (4 * a) == 0:
                c = (b * b + d) // (4 * a)
                if ReducedForm(a, b, c).is_reduced():
                    out.add((a, b, c))
    return sorted(out)


class TestReducedForms:
    def test_small(self):
        assert reduced_forms(3) == [ReducedForm(1, 1, 1)]
        assert reduced_forms(4) == [ReducedForm(1, 0, 1)]

    def test_d23(self):
        assert sorted(reduced_forms(23)) == sorted([ReducedForm(1, 1, 6), ReducedForm(2, 1, 3),
                                                    ReducedForm(2, -1, 3)])

    def test_imprimitive_included(self):
        assert ReducedForm(2, 2, 2) in reduced_forms(12)

    @pytest.mark.parametrize("d", [0, -3, 5, 6, 9, 10])
    def test_bad(self, d):
        with pytest.raises(BadDiscriminant):
            reduced_forms(d)

    def test_against_brute_force(self):
        for d in VALID[:60]:
            got = [(f.a, f.b, f.c) for f in reduced_forms(d)]
            assert got == _brute_class_reps(d)

    def test_reduced_invariants(self):
        for d in VALID:
            for f in reduced_forms(d):
                assert f.discriminant == -d and f.is_reduced()

    def test_class_count_positive(self):
        assert all(len(reduced_forms(d)) >= 1 for d in VALID)

    def test_reduction_completeness(self):
        rng = random.Random(50)
        for d in rng.sample(VALID + list(range(303, 2001, 4)), 50):
            reps = reduced_forms(d)
            for f in reps:
                for _ in range(4):
                    while True:
                        p, q, r, s = (rng.randint(-10, 10) for _ in range(4))
                        if p * s - q * r == 1:
                            break
                    # (a,b,c) transformed by x -> p x + q y, y -> r x + s y
                    a = f.a * p * p + f.b * p * r + f.c * r * r
                    b = 2 * f.a * p * q + f.b * (p * s + q * r) + 2 * f.c * r * s
                    c = f.a * q * q + f.b * q * s + f.c * s * s
                    assert reduce_form(a, b, c) == f

    def test_omega(self):
        assert omega_q(ReducedForm(1, 1, 1)) == 3
        assert omega_q(ReducedForm(1, 0, 1)) == 2
        assert omega_q(ReducedForm(2, 2, 2)) == 3
        assert omega_q(ReducedForm(2, 0, 2)) == 2
        assert omega_q(ReducedForm(1, 1, 6)) == 1


class TestTraces:
    def test_forced_values(self):
        assert trace_singular_moduli(3).t == -248
        assert trace_singular_moduli(4).t == 492
        assert trace_singular_moduli(3).class_count == 1
        assert trace_singular_moduli(4).class_count == 1

    def test_d7(self):
        assert trace_singular_moduli(7).t == -4119

    def test_rounding_margin(self):
        worst = max(trace_oracle(d).max_rounding_error for d in VALID)
        assert worst < 1e-10

    def test_guard_fires_at_low_precision(self):
        with pytest.raises(RoundingGuard) as err:
            trace_singular_moduli(299, bits=24)
        assert err.value.d == 299

    def test_oracle_matches_series(self):
        z = zagier_trace_form(301, cross_check=False).series
        assert all(trace_oracle(d).t == -z[d] for d in VALID)


class TestTable:
    def test_entries(self):
        tab = trace_table(400)
        assert tab[3] == -248 and tab[4] == 492
        assert all(d % 4 in (0, 3) for d in tab)
        assert 5 not in tab and 6 not in tab

    def test_modular(self):
        tab = trace_table(600, 7)
        exact = trace_table(600)
        assert tab == {d: t % 7 for d, t in exact.items()}

    def test_parallel_same(self):
        assert trace_table(1000, jobs=2) == trace_table(1000)

    def test_sample(self):
        s = sm.oracle_sample(2000)
        assert 300 in s and 500 in s and 1000 in s and 1500 in s and 301 not in s

    def test_cross_check_failure(self, monkeypatch):
        real = sm._oracle_t
        monkeypatch.setattr(sm, "_oracle_t", lambda d: (d, real(d)[1] + (d == 47)))
        with pytest.raises(CrossCheckFailed) as err:
            trace_table(100)
        assert err.value.d == 47

    def test_small_dmax(self):
        with pytest.raises(BadDiscriminant):
            trace_table(2)
