from fractions import Fraction

import gmpy2
import pytest

from vcwb.errors import DomainError, PrecisionError
from vcwb.jets import Jet2, const, power_jet
from vcwb.jones_exact import colored_jones
from vcwb.mp_eval import (
    RESIDUAL_TOL,
    build_tables,
    eval_jones_at_root,
    evaluate_at_root,
    qint_jet,
    st_split,
)
from vcwb.precision import default_digits, digits_to_bits, rel_err, unit, working_precision
from vcwb.qlaurent import eval_on_unit_circle, qint


@pytest.mark.parametrize("N", range(2, 13))
def test_matches_exact_polynomial(N):
    r = evaluate_at_root(N, 80)
    exact = eval_on_unit_circle(colored_jones(N), Fraction(1, N), 80)
    assert rel_err(r.value, exact) <= gmpy2.mpfr("1e-40")
    assert all(x <= RESIDUAL_TOL for x in r.residuals)


def test_j2_at_minus_one():
    assert eval_jones_at_root(2, 40) == 5


def test_default_precision():
    assert eval_jones_at_root(5).real == pytest.approx(float(eval_jones_at_root(5, 80).real), rel=1e-15)


def test_reordering_terms_changes_nothing_significant():
    a = evaluate_at_root(20, 80).value
    b = evaluate_at_root(20, 80, order=lambda ts: ts[::-1]).value
    assert rel_err(a, b) < 1e-60


def test_cancellation_grows_with_n():
    lost = []
    for N in (20, 60):
        r = evaluate_at_root(N, 80)
        lost.append(float(gmpy2.log10(r.max_term[2] / abs(r.f[2]))))
    assert 0 < lost[0] < lost[1]


def test_domain():
    with pytest.raises(DomainError):
        evaluate_at_root(1, 80)
    with pytest.raises(DomainError):
        build_tables(3, 20)


def test_residual_guard(monkeypatch):
    import vcwb.mp_eval as me

    monkeypatch.setattr(me, "RESIDUAL_TOL", gmpy2.mpfr("1e-300"))
    with pytest.raises(PrecisionError):
        evaluate_at_root(10, 40)
    assert evaluate_at_root(10, 40, check=False).value != 0


class TestTables:
    def test_qint_jet_value(self):
        with working_precision(60):
            for m in range(1, 12):
                v = qint_jet(m, Fraction(1, 14))[0]
                want = eval_on_unit_circle(qint(m), Fraction(1, 7), 60)
                assert abs(v - want) < 1e-50

    def test_sizes(self):
        tab = build_tables(4, 40)
        assert len(tab.integers) == len(tab.factorials) == len(tab.ratio_factorials) == 3 * 4 + 3
        assert len(tab.binomials) == 2 * 4 + 1
        assert tab.N == 5 and tab.turns == Fraction(1, 10)

    def test_vanishing_integer(self):
        tab = build_tables(5, 60)
        assert abs(tab.integers[6][0]) < 1e-55
        assert abs(tab.integers[12][0]) < 1e-55

    def test_st_value(self):
        S, T = st_split(4, 60)
        with working_precision(60):
            assert abs(S[0] - 10 * unit(Fraction(-1, 10))) < 1e-55


class TestJets:
    def test_arithmetic(self):
        with working_precision(50):
            a = Jet2(gmpy2.mpc(2), gmpy2.mpc(3), gmpy2.mpc(5))
            b = Jet2(gmpy2.mpc(7), gmpy2.mpc(-1), gmpy2.mpc(4))
            p = a * b
            assert p == Jet2(14, 2 * -1 + 3 * 7, 2 * 4 + 2 * 3 * -1 + 5 * 7)
            q = p / b
            assert all(abs(x - y) < 1e-45 for x, y in zip(q, a))
            assert (a + 1)[0] == 3 and (1 - a)[0] == -1 and (-a)[1] == -3
            assert (a ** 3)[0] == 8

    def test_division_by_vanishing_jet(self):
        with working_precision(50):
            with pytest.raises(PrecisionError):
                const(1) / Jet2(gmpy2.mpc(0), gmpy2.mpc(1))

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            const(2) ** -1

    def test_power_jet_integer(self):
        with working_precision(50):
            j = power_jet(3, Fraction(1, 8))
            B0 = unit(Fraction(1, 8))
            assert abs(j[0] - B0 ** 3) < 1e-45
            assert abs(j[1] - 3 * B0 ** 2) < 1e-45
            assert abs(j[2] - 6 * B0) < 1e-45


class TestPrecision:
    def test_policy(self):
        assert default_digits(2) == 80 and default_digits(260) == 80
        assert default_digits(261) == 200 and default_digits(560) == 200
        assert default_digits(1000) == 400

    def test_bits(self):
        assert digits_to_bits(80) == 266

    def test_unit_exact_quarters(self):
        assert unit(Fraction(1, 4)) == gmpy2.mpc(0, 1)
        assert unit(Fraction(-1, 2)) == -1
        with working_precision(50):
            w = unit(Fraction(1, 3))
            assert abs(w ** 3 - 1) < 1e-45
