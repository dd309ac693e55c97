import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from heegner import DomainError
from heegner.dirichlet_l import (
    L1, Lprime1, Lprime1_fd, chi_vector, kronecker, l_report, script_LD, script_LD_float,
)
from heegner.quadclass import class_number, fundamental_discriminants

FUND = fundamental_discriminants(-3000, -3)


def test_kronecker_small_values():
    assert [kronecker(-4, n) for n in range(1, 9)] == [1, 0, -1, 0, 1, 0, -1, 0]
    assert [kronecker(-7, n) for n in (1, 2, 3, 4, 5, 6)] == [1, 1, -1, 1, -1, -1]
    assert kronecker(-8, 3) == 1 and kronecker(-8, 5) == -1


def test_kronecker_against_legendre():
    for D in (-3, -23, -163, -9983):
        for p in (3, 5, 7, 11, 101, 997):
            if D % p:
                assert kronecker(D, p) == (1 if pow(D % p, (p - 1) // 2, p) == 1 else -1)


@given(st.sampled_from(FUND), st.integers(1, 500), st.integers(1, 500))
def test_chi_completely_multiplicative(D, m, n):
    assert kronecker(D, m * n) == kronecker(D, m) * kronecker(D, n)


@given(st.sampled_from(FUND), st.integers(1, 2000))
def test_chi_periodic(D, n):
    assert kronecker(D, n) == kronecker(D, n - D)


def test_chi_vector_matches_symbol():
    v = chi_vector(-1007, 500)
    assert all(int(v[n - 1]) == kronecker(-1007, n) for n in range(1, 501))


def test_L1_of_gaussian_character():
    val, err = L1(-4, 128)
    with mpmath.workprec(140):
        assert abs(val - mpmath.pi / 4) < err + mpmath.mpf(2) ** -120


def test_Lprime1_of_gaussian_character():
    # independent oracle: L'(1, chi_-4) = (pi/4)(gamma + 2 log 2 + 3 log pi - 4 log Gamma(1/4))
    with mpmath.workprec(200):
        ref = mpmath.pi / 4 * (mpmath.euler + 2 * mpmath.log(2) + 3 * mpmath.log(mpmath.pi)
                               - 4 * mpmath.log(mpmath.gamma(mpmath.mpf(1) / 4)))
        val, err = Lprime1(-4, 128)
        assert abs(val - ref) < err + mpmath.mpf(2) ** -120
    assert float(val) == pytest.approx(0.192901316796912, abs=1e-14)


@pytest.mark.parametrize("D", [-3, -7, -23, -47, -163, -1007])
def test_L1_against_hurwitz_route(D):
    # L(1, chi) = -(1/q) sum chi(a) psi(a/q), an independent classical route
    q = -D
    with mpmath.workprec(120):
        ref = -sum(kronecker(D, a) * mpmath.digamma(mpmath.mpf(a) / q) for a in range(1, q)) / q
        val, err = L1(D, 100)
        assert abs(val - ref) < err + mpmath.mpf(2) ** -90


@pytest.mark.parametrize("D", [-3, -8, -23, -191, -1019])
def test_Lprime1_three_routes(D):
    val, err = Lprime1(D, 128, crosscheck=False)
    fd = Lprime1_fd(D, 64)
    assert abs(val - fd) < 1e-12
    # Hurwitz route: L'(1) = (1/q) sum chi(a) (log q * psi(a/q) - gamma_1(a/q))
    q = -D
    with mpmath.workprec(100):
        s = mpmath.mpf(0)
        for a in range(1, q):
            c = kronecker(D, a)
            if c:
                x = mpmath.mpf(a) / q
                g1 = mpmath.stieltjes(1, x)
                s += c * (mpmath.log(q) * mpmath.digamma(x) - g1)
        ref = s / q
    assert abs(val - ref) < 1e-25


def test_script_LD_definition():
    for D in (-3, -4, -23, -9983):
        rep = l_report(D, 128)
        with mpmath.workprec(140):
            direct = mpmath.log(-D) / 2 + rep.Lprime1 / rep.L1
            assert abs(direct - rep.script_LD) < 1e-35


@given(st.sampled_from(FUND))
def test_float_path_agrees(D):
    val, _ = script_LD(D, 96)
    assert abs(script_LD_float(D) - float(val)) < 1e-10


@given(st.sampled_from(FUND))
def test_class_number_formula(D):
    val, err = L1(D, 64)
    w = {-3: 6, -4: 4}.get(D, 2)
    assert abs(val * w * math.sqrt(-D) / (2 * math.pi) - class_number(D)) < 1e-12


def test_rejects_nonfundamental():
    with pytest.raises(DomainError):
        L1(-12)
    with pytest.raises(DomainError):
        script_LD(5)


def test_precision_halving():
    # the reported error bound tightens as precision grows
    e1 = l_report(-163, 64).script_LD_err
    e2 = l_report(-163, 128).script_LD_err
    assert e2 < e1 * 2 ** -50
