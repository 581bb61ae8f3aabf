"""Residue-class counts, growth verdicts and the Treneer-type split."""

import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from qforms.errors import PrecisionExhausted, StreamTooShort
from qforms.forms import theta, zagier_trace_form
from qforms.operators import u_iterate, v_op
from qforms.series import QSeries
from qforms.stats import (DEFAULT_CHECKPOINTS, residue_counts, trace_stream, treneer_split,
                          treneer_split_two_path, well_distribution_scan)

from strategies import series

FROZEN = json.loads((Path(__file__).parent / "fixtures" / "trace_residue_counts.json").read_text())


class TestResidueCounts:
    def test_constant_zero(self):
        r = residue_counts([0] * 101, 5, [100])
        assert r.counts[0] == (101,)
        assert all(r.counts[k] == (0,) for k in range(1, 5))

    def test_equidistributed(self):
        r = residue_counts(list(range(101)), 5, [100])
        assert [r.counts[k][0] for k in range(5)] == [21, 20, 20, 20, 20]

    def test_short(self):
        with pytest.raises(StreamTooShort):
            residue_counts([1, 2, 3], 5, [10])

    def test_normalization(self):
        import math
        r = residue_counts([1] * 2501, 5, [2500])
        assert r.normalized[1][0] == pytest.approx(2501 / (50 / math.log(2500)))
        assert r.normalized[0][0] == 0.0

    @given(st.lists(st.integers(-100, 100), min_size=60, max_size=300), st.sampled_from([5, 7, 25]),
           st.lists(st.integers(2, 59), min_size=1, max_size=5))
    def test_conservation_and_monotone(self, stream, m, cps):
        r = residue_counts(stream, m, cps)
        for i, x in enumerate(r.checkpoints):
            assert r.total(i) == x + 1
        for v in r.counts.values():
            assert list(v) == sorted(v)

    @given(st.lists(st.integers(0, 10 ** 6), min_size=60, max_size=200), st.sampled_from([5, 7, 25]),
           st.integers(1, 24))
    def test_unit_scaling_permutes(self, stream, m, u):
        if u % 5 == 0 or u % 7 == 0:
            return
        a = residue_counts(stream, m, [20, 40, 50, 59])
        b = residue_counts([u * c for c in stream], m, [20, 40, 50, 59])
        assert sorted(a.counts.values()) == sorted(b.counts.values())
        assert sorted(a.verdicts.values()) == sorted(b.verdicts.values())
        for r in range(m):
            assert a.counts[r] == b.counts[u * r % m]

    def test_report_outputs(self):
        r = residue_counts(list(range(3000)), 5, [2500])
        d = r.to_dict()
        assert "evidence" in d["note"]
        assert r.to_csv().splitlines()[0] == "X,r,count,normalized"


class TestTraceDistribution:
    @pytest.mark.parametrize("ell", [5, 7])
    def test_frozen_counts(self, ell):
        z = zagier_trace_form(20001, ell).series
        r = residue_counts(trace_stream(z, 20000), ell, FROZEN["checkpoints"])
        assert {str(k): list(v) for k, v in r.counts.items()} == FROZEN["counts"][str(ell)]
        assert all(v[-1] >= 50 for v in r.counts.values())

    def test_trace_stream(self):
        s = trace_stream(zagier_trace_form(10).series)
        assert s[:5] == [2, 0, 0, -248, 492]

    def test_zagier_scan(self):
        z = zagier_trace_form(20001).series
        r = well_distribution_scan(z, 5, 1, (5000, 10000, 20000))
        assert set(r.verdicts.values()) == {"consistent"}

    def test_theta_scan(self):
        r = well_distribution_scan(theta(50001).series, 5, 1)
        assert r.checkpoints == DEFAULT_CHECKPOINTS
        assert r.counts[1][-1] == 1  # only a(0) = 1
        assert r.counts[3][-1] == r.counts[4][-1] == 0
        assert r.verdicts[1] == r.verdicts[3] == r.verdicts[4] == "inconsistent"
        assert r.verdicts[2] == "consistent"
        assert r.normalized[2][-1] > r.normalized[2][0]

    def test_scan_capped(self):
        r = well_distribution_scan(theta(12000).series, 5, 1)
        assert r.checkpoints == (2500, 5000, 10000)
        with pytest.raises(StreamTooShort):
            well_distribution_scan(theta(100).series, 5, 1)


class TestTreneer:
    def test_theta(self):
        s = treneer_split(theta(400).series, 5, 0, 1)
        assert dict(s.coeffs) == {n * n: 2 for n in range(1, 20) if n % 5}

    def test_vanishing(self):
        z = zagier_trace_form(2000).series
        for m in range(3):
            s = treneer_split(z, 5, m, 2)
            assert s.modulus == 25
            assert all(e % 5 and e >= 1 for e, _ in s.items())

    def test_exhausted(self):
        with pytest.raises(PrecisionExhausted):
            treneer_split(theta(5).series, 5, 0, 1)

    @given(st.sampled_from([5, 7]).flatmap(lambda ell: st.tuples(
        st.just(ell), series(min_val=-3, max_len=400), st.integers(0, 2), st.integers(1, 3))))
    def test_two_path(self, args):
        ell, f, m, j = args
        if -(-f.precision // ell ** (m + 1)) < 2:
            with pytest.raises(PrecisionExhausted):
                treneer_split(f, ell, m, j)
            return
        direct = treneer_split(f, ell, m, j)
        two = treneer_split_two_path(f, ell, m, j)
        n = min(direct.precision, two.precision)
        # the identity lives on the holomorphic part, n >= 0
        assert direct.coefficients(0, n) == two.coefficients(0, n)
        # composed back: U_{ell^m} f = split + (U_{ell^{m+1}} f)|V_ell  mod ell^j
        back = direct + v_op(u_iterate(f, ell, m + 1), ell).reduce(ell ** j)
        assert back.coefficients(1, n) == u_iterate(f, ell, m).reduce(ell ** j).coefficients(1, n)
