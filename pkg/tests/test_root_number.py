import pytest
from hypothesis import given, strategies as st

from heegner import root_number as rn
from heegner._arith import factorint, omega, primes_upto
from heegner.cli import ingest_curves
from heegner.dirichlet_l import kronecker
from heegner.heegner_points import heegner_condition
from heegner.quadclass import is_fundamental

CURVES = ingest_curves()
FUND = [D for D in range(-3, -801, -1) if is_fundamental(D)]


def test_local_epsilon_basic(e37):
    assert rn.local_epsilon(e37, -7, "inf").value == -1
    e = rn.local_epsilon(e37, -7, 5)
    assert (e.value, e.provenance) == (1, "unramified")
    # (p, D) = 1 row of the table: eps_37 chi_{D,37}(-1) = chi_{D,37}(37) = (-7/37)
    assert rn.table_value(e37, -7, 37) == kronecker(-7, 37) == 1
    assert rn.local_epsilon(e37, -7, 37).provenance == "table"


def test_unavailable_outside_table(curves):
    # 27a1 has 9 | N; at D = -3 the table does not apply
    E = curves["27a1"]
    assert rn.local_epsilon(E, -3, 3).value == rn.UNAVAILABLE
    assert rn.global_sign(E, -3) == rn.UNAVAILABLE
    assert rn.construct_datum(E, -3) == rn.UNAVAILABLE


def test_sign_37a1_minus3(e37):
    assert rn.global_sign(e37, -3) == -kronecker(-3, 37) == -1


def test_sign_coprime_character(e37):
    for D in FUND:
        if D % 37:
            assert rn.global_sign(e37, D) == -kronecker(D, 37)


@pytest.mark.parametrize("label", sorted(CURVES))
def test_heegner_condition_forces_minus_one(label):
    E = CURVES[label]
    for D in FUND:
        if heegner_condition(E.conductor, D):
            assert rn.global_sign(E, D) == -1
            d = rn.construct_datum(E, D)
            assert (d.N1, d.N2) == (E.conductor, 1)
            assert all(t == rn.SPLIT for t in d.local_ext.values())
            assert rn.validate_datum(d)[0]


@given(st.sampled_from(sorted(CURVES)), st.sampled_from(FUND))
def test_sign_iff_condition_ii(label, D):
    E = CURVES[label]
    s = rn.global_sign(E, D)
    d = rn.construct_datum(E, D)
    if s == rn.UNAVAILABLE or d == rn.UNAVAILABLE:
        return
    ii = omega(d.N2) % 2 == 0
    assert (s == -1) == ii


@given(st.sampled_from(sorted(CURVES)), st.sampled_from(FUND))
def test_sign_is_product_of_table_values(label, D):
    E = CURVES[label]
    s = rn.global_sign(E, D)
    if s == rn.UNAVAILABLE:
        return
    prod = -1
    for p in factorint(E.conductor):
        prod *= rn.table_value(E, D, p)
    assert s == prod


def test_literal_epsilon_product_is_trivial(e37):
    # the product of the tabulated eps_v over all places is +1 for every D,
    # so it cannot be the sign; see the decisions log
    for D in FUND:
        prod = 1
        for e in rn.local_factors(e37, D):
            prod *= e.value
        assert prod == 1


def test_nonsplit_datum_rejected(e37):
    for D in FUND:
        if D % 37 and kronecker(D, 37) == -1:
            d = rn.construct_datum(e37, D)
            assert omega(d.N2) % 2 == 1
            ok, why = rn.validate_datum(d)
            assert not ok and any(v.startswith("(ii)") for v in why)


def test_validate_datum_examples():
    ok, why = rn.validate_datum(rn.ShimuraDatum(37, 1, {37: rn.SPLIT}))
    assert ok and why == []
    ok, why = rn.validate_datum(rn.ShimuraDatum(1, 37, {37: ("ramified", 1)}))
    assert not ok and why == ["(ii) N2 has an odd number of prime factors"]
    ok, why = rn.validate_datum(rn.ShimuraDatum(1, 14, {2: rn.SPLIT, 7: ("ramified", 1)}))
    assert not ok and any(v.startswith("(i)") for v in why)
    ok, why = rn.validate_datum(rn.ShimuraDatum(1, 4 * 7, {2: rn.UNRAMIFIED, 7: ("ramified", -1)}))
    assert not ok and any(v.startswith("(iii)") for v in why)
    ok, why = rn.validate_datum(rn.ShimuraDatum(3, 1, {3: rn.UNRAMIFIED}))
    assert not ok and any(v.startswith("(iv)") for v in why)
    assert rn.validate_datum(rn.ShimuraDatum(9, 1, {3: rn.UNRAMIFIED}))[0]


def test_local_algebra_tags():
    assert rn.local_algebra(-7, 2) == rn.SPLIT
    assert rn.local_algebra(-3, 2) == rn.UNRAMIFIED
    assert rn.local_algebra(-3, 3) in rn.ramified_tags(3)
    for D in FUND:
        if D % 2 == 0:
            assert rn.local_algebra(D, 2) in rn.ramified_tags(2)
    assert len(rn.ramified_tags(2)) == 6 and len(rn.ramified_tags(5)) == 2


def test_prime_discriminant_part():
    for D in FUND:
        for p in factorint(-D):
            ps = rn.prime_discriminant_part(D, p)
            assert D % ps == 0 and ps % 4 in (0, 1)
            assert ps in (-4, 8, -8) if p == 2 else abs(ps) == p
            rest = D // ps
            assert rest == 1 or (rest < 0 and is_fundamental(rest)) or rest % 4 in (0, 1)


def test_chi_local_reciprocity():
    # prod over p | D of chi_{D,p}(-1) is -1 for imaginary fields
    for D in FUND:
        prod = 1
        for p in factorint(-D):
            prod *= rn.chi_local(D, p, -1)
        assert prod == -1


def test_count_small():
    assert rn.count_data(1) == 1
    for p in primes_upto(100):
        assert rn.count_data(p) <= 15 * 7
    assert rn.count_data(2) == 7 and rn.count_data(3) == 3 and rn.count_data(6) == 42


def test_count_depends_on_exponent_parity():
    for p in (2, 3, 5):
        assert rn.count_data(p) == rn.count_data(p ** 3)
        assert rn.count_data(p * p) == rn.count_data(p ** 4)


def test_sign_report_shape(e37):
    rep = rn.sign_report(e37, -7)
    assert rep["sign"] == -1 and rep["heegner_condition"]
    assert rep["datum"]["valid"] and rep["datum"]["N2"] == 1
    assert rep["local_factors"]["inf"] == -1
