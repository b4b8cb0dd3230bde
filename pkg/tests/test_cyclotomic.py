import cmath
from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from etalift.cyclotomic import (
    BaseRing, CycInt, ConsistencyError, DivisibilityError, check_prime, compute_eta_data,
    delta_s, eta, primitive_root_choice, quotient, reduce_mod,
)

PRIMES = (2, 3, 5, 7, 11)


def as_complex(a: CycInt) -> complex:
    z = cmath.exp(2j * cmath.pi / a.p)
    return sum(c * z ** k for k, c in enumerate(a.coeffs))


def sympy_poly(a: CycInt):
    X = sympy.Symbol("X")
    return sum(c * X ** k for k, c in enumerate(a.coeffs)), X


def cyc(p):
    return st.lists(st.integers(-20, 20), min_size=p - 1, max_size=p - 1).map(
        lambda v: CycInt(p, v))


@pytest.mark.parametrize("p", [3, 5, 7])
@given(data=st.data())
@settings(max_examples=40, deadline=None)
def test_product_matches_sympy_reduction(p, data):
    a, b = data.draw(cyc(p)), data.draw(cyc(p))
    pa, X = sympy_poly(a)
    pb, _ = sympy_poly(b)
    phi = sympy.cyclotomic_poly(p, X)
    rem = sympy.Poly(sympy.rem(sympy.expand(pa * pb), phi, X), X)
    expected = [int(rem.coeff_monomial(X ** k)) for k in range(p - 1)]
    assert list((a * b).coeffs) == expected


@pytest.mark.parametrize("p", PRIMES)
@given(data=st.data())
@settings(max_examples=25, deadline=None)
def test_ring_operations_match_complex_embedding(p, data):
    a, b = data.draw(cyc(p)), data.draw(cyc(p))
    assert abs(as_complex(a + b) - (as_complex(a) + as_complex(b))) < 1e-6
    assert abs(as_complex(a * b) - as_complex(a) * as_complex(b)) < 1e-3


@pytest.mark.parametrize("p", [3, 5, 7])
@given(data=st.data())
@settings(max_examples=25, deadline=None)
def test_norm_is_product_of_conjugates(p, data):
    a = data.draw(cyc(p))
    z = cmath.exp(2j * cmath.pi / p)
    prod = 1
    for k in range(1, p):
        prod *= sum(c * z ** (k * j) for j, c in enumerate(a.coeffs))
    assert abs(prod.real - a.norm()) < 1e-3 * max(1, abs(a.norm()))


@pytest.mark.parametrize("p", PRIMES)
def test_rho_has_order_p(p):
    r = CycInt.rho_power(p, 1)
    assert r ** p == CycInt.one(p)
    assert all(r ** k != CycInt.one(p) for k in range(1, p))


@pytest.mark.parametrize("p", PRIMES)
def test_eta_data_relations(p):
    d = compute_eta_data(p)
    assert d.eta ** (p - 1) == -(d.y * p)
    assert d.x_unit * d.eta ** (p - 1) == CycInt.from_int(p, p)
    assert d.x_unit * d.y == CycInt.from_int(p, -1)
    assert reduce_mod(d.x_unit + 1, 0, 1) == 0
    assert d.b == tuple(comb(p, i) // p for i in range(1, p))


def test_eta_data_p2_by_hand():
    d = compute_eta_data(2)
    assert d.eta == CycInt.from_int(2, -2)
    assert d.y == CycInt.from_int(2, 1)
    assert d.x_unit == CycInt.from_int(2, -1)


@pytest.mark.parametrize("p,s", [(3, 2), (5, 2), (5, 3), (7, 3)])
def test_delta_is_geometric_sum(p, s):
    d = delta_s(p, s)
    assert d * eta(p) == CycInt.rho_power(p, s) - 1
    assert d.is_unit()


@pytest.mark.parametrize("p", PRIMES)
def test_delta_p_is_zero(p):
    assert not delta_s(p, p)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_tau_is_ring_automorphism(p):
    s, _ = primitive_root_choice(p)
    a = CycInt(p, list(range(1, p)))
    b = CycInt(p, [(-1) ** k * k for k in range(p - 1)])
    assert (a * b).tau(s) == a.tau(s) * b.tau(s)
    x = a
    for _ in range(p - 1):
        x = x.tau(s)
    assert x == a


@pytest.mark.parametrize("p,expected", [(3, (2, 1)), (5, (2, 3)), (7, (3, 104))])
def test_primitive_root_choice(p, expected):
    s, r = primitive_root_choice(p)
    assert (s, r) == expected
    assert s ** (p - 1) - 1 == p * r and r % p


def test_exact_division_and_units():
    p = 5
    e = eta(p)
    a = CycInt(p, [3, -1, 4, 1])
    assert (a * e).exact_div(e) == a
    with pytest.raises(DivisibilityError):
        CycInt.one(p).exact_div(e)
    assert (e ** 2).norm() == p ** 2
    u = delta_s(p, 2)
    assert u * u.inverse() == CycInt.one(p)


def test_check_prime_rejects():
    with pytest.raises(ValueError):
        check_prime(9)


@pytest.mark.parametrize("p,m,order", [(3, 9, 81), (5, 5, 625), (2, 4, 4), (3, 7, 49)])
def test_quotient_orders(p, m, order):
    assert quotient(p, m).order == order


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_residue_field_is_fp(p):
    F = quotient(p, None, 1)
    assert F.order == p
    assert F.reduce(CycInt.rho_power(p, 1)) == F.reduce(CycInt.one(p))


def test_quotient_inverse_brute_force():
    R = quotient(3, 9)
    elems = R.elements()
    assert len(elems) == 81
    for a in elems:
        inv = R.try_invert(a)
        brute = [b for b in elems if R.reduce(a * b) == R.reduce(CycInt.one(3))]
        assert (inv is None) == (not brute)
        if inv is not None:
            assert inv in brute


def test_base_ring_equality_by_ideal():
    assert quotient(3, 3) == BaseRing(3, [eta(3) ** 2])
    assert quotient(3, 9) != quotient(3, 3)


def test_consistency_error_is_assertion():
    assert issubclass(ConsistencyError, AssertionError)
