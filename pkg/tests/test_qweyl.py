import random

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from etalift.cyclotomic import CycInt, delta_s, quotient
from etalift.qweyl import (
    QWeylElem, azumaya_det, basis, brauer_lift_demo, commutation_closed_form, commutator,
    det_mod, diff_crossed_product_check, matrix_is_invertible, nilpotence_witness,
    psi_matrix, psi_matrix_mod, random_elem, rank_mod, rewrite_words, rho_image_mod,
    specialize_cyclic, structure_constants, verify_center,
)
from etalift.ring import RingCtx, finite_ctx, polynomial_ring


def rho(p):
    return CycInt.rho_power(p, 1)


def test_defining_relation():
    for p in (2, 3, 5):
        x, y = QWeylElem.x(p), QWeylElem.y(p)
        assert x * y - QWeylElem(p, {(1, 1): rho(p)}) == QWeylElem.scalar(p, 1)


def test_x_squared_y():
    p = 5
    e = QWeylElem.word(p, "xxy")
    assert e.terms == {(1, 2): rho(p) ** 2, (0, 1): 1 + rho(p)}


def test_string_forms():
    assert str(QWeylElem.word(3, "xy")) == "ρ·yx + 1"
    assert str(QWeylElem.word(2, "xy")) == "-yx + 1"
    assert str(QWeylElem(3, {})) == "0"


@pytest.mark.parametrize("p", [2, 3, 5])
def test_commutation_closed_form(p):
    y = QWeylElem.y(p)
    for i in range(2 * p + 1):
        word = "x" * i + "y"
        assert rewrite_words(p, word) == commutation_closed_form(p, i)
        assert QWeylElem.word(p, word) == commutation_closed_form(p, i)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_rewriting_is_confluent(p):
    rng = random.Random(p)
    for _ in range(500):
        w = "".join(rng.choice("xy") for _ in range(rng.randint(0, 12)))
        left = rewrite_words(p, w, "left")
        assert left == rewrite_words(p, w, "right")
        assert left == QWeylElem.word(p, w)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_associativity(p):
    rng = random.Random(10 + p)
    for _ in range(70):
        a, b, c = (random_elem(p, rng, terms=3, deg=3) for _ in range(3))
        assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_center(p):
    rep = verify_center(p)
    assert all(rep.values()), rep


def test_center_p2_by_hand():
    # x^2 y = y x^2 + (1 + rho) x and 1 + rho = 0 at p = 2
    assert QWeylElem.word(2, "xxy") == QWeylElem.word(2, "yxx")
    assert not delta_s(2, 2)


def test_unit_and_scalar_identities():
    p = 3
    a = QWeylElem.word(p, "xyyx") + 2
    assert QWeylElem.scalar(p, 1) * a == a
    assert not commutator(QWeylElem.scalar(p, 5), QWeylElem.y(p))


def test_word_rejects_letters():
    with pytest.raises(ValueError):
        QWeylElem.word(3, "xz")


# --- psi and the Azumaya locus --------------------------------------------------


def _sympy_quaternion_det():
    """Independent p = 2 oracle: B = <x, y | xy + yx = 1, x^2 = s, y^2 = t>
    with basis 1, x, y, yx multiplied by hand, psi built in sympy."""
    s, t = sympy.symbols("s t")
    # basis order: e0 = 1, e1 = x, e2 = y, e3 = yx ; products as coordinate vectors
    # xy = 1 - yx, x.yx = (1 - yx) x ... expand by hand via the rewrite x y -> 1 - y x
    def mul(a, b):
        return _mul_words(a, b, s, t)

    B = [(0, 0), (0, 1), (1, 0), (1, 1)]
    vec = {}
    for i, a in enumerate(B):
        for j, b in enumerate(B):
            vec[(i, j)] = mul(a, b)
    idx = {e: k for k, e in enumerate(B)}
    M = sympy.zeros(16, 16)
    for ai in range(4):
        for bi in range(4):
            for ci in range(4):
                # e_a e_c e_b
                left = vec[(ai, ci)]
                out = {}
                for d, coef in left.items():
                    for d2, coef2 in mul(d, B[bi]).items():
                        out[d2] = out.get(d2, 0) + coef * coef2
                for d, coef in out.items():
                    M[ci * 4 + idx[d], ai * 4 + bi] += coef
    return sympy.factor(M.det()), s, t


def _mul_words(a, b, s, t):
    """(y^i x^j)(y^k x^l) at p = 2 by repeated xy -> 1 - yx, then x^2 -> s, y^2 -> t."""
    from collections import Counter
    word = "y" * a[0] + "x" * a[1] + "y" * b[0] + "x" * b[1]
    todo = Counter({word: 1})
    done = Counter()
    while todo:
        w, c = todo.popitem()
        k = w.find("xy")
        if k < 0:
            done[w] += c
            continue
        todo[w[:k] + w[k + 2:]] += c
        todo[w[:k] + "yx" + w[k + 2:]] -= c
    out = {}
    for w, c in done.items():
        if not c:
            continue
        ny, nx = w.count("y"), w.count("x")
        key = (ny % 2, nx % 2)
        out[key] = out.get(key, 0) + c * t ** (ny // 2) * s ** (nx // 2)
    return out


def test_p2_symbolic_det_matches_sympy_oracle():
    oracle, s, t = _sympy_quaternion_det()
    assert sympy.expand(oracle - (1 - 4 * s * t) ** 8) == 0
    cert = azumaya_det(2, "symbolic")
    assert cert.exponent == 8
    assert cert.checks["exponent_signed_form"] == 8
    assert cert.checks["f_mod_p_is_unit_constant"]


def test_structure_constants_reproduce_products():
    p = 3
    for (a, b), entry in structure_constants(p).items():
        prod = QWeylElem(p, {a: CycInt.one(p)}) * QWeylElem(p, {b: CycInt.one(p)})
        rebuilt = {}
        for d, poly in entry.items():
            for (ds, dt), c in poly.items():
                rebuilt[(d[0] + p * dt, d[1] + p * ds)] = c
        assert rebuilt == prod.terms


def test_psi_mod_matches_ring_version():
    p, q = 3, 7
    rc = rho_image_mod(p, q)
    M = psi_matrix_mod(p, q, rc, 2, 5)
    R = RingCtx(quotient(p, q))
    Mr = psi_matrix(p, R, 2, 5)
    # compare after sending rho to rc
    for i in range(len(M)):
        for j in range(len(M)):
            c = Mr[i][j].constant() if Mr[i][j].terms else CycInt.zero(p)
            val = sum(v * pow(rc, k, q) for k, v in enumerate(c.coeffs)) % q
            assert val == M[i][j] % q


@pytest.mark.parametrize("p", [2, 3])
def test_azumaya_sweep_signed_locus(p):
    cert = azumaya_det(p, "evaluated")
    assert cert.checks["signed_locus_matches"]
    assert len(cert.points) == 49


def test_azumaya_sweep_p3_literal():
    cert = azumaya_det(3, "evaluated")
    assert cert.checks["locus_matches"]


def test_azumaya_p2_literal_locus_differs():
    cert = azumaya_det(2, "evaluated")
    # over F_7 the classes of 1 + 4st and 1 - 4st have different zero sets
    assert cert.checks["mismatches"] > 0


def test_rank_and_det_mod_agree():
    rng = np.random.default_rng(0)
    for _ in range(20):
        M = rng.integers(0, 7, size=(5, 5))
        assert (rank_mod(M, 7) == 5) == (det_mod(M, 7) != 0)
        assert det_mod(M, 7) == int(round(np.linalg.det(M))) % 7


@pytest.mark.parametrize("p,q", [(2, 7), (3, 7)])
def test_nilpotence_witness_on_degenerate_locus(p, q):
    rc = rho_image_mod(p, q)
    ep = pow(rc - 1, p, q)
    sign = (-1) ** (p - 1)
    bad = [(s, t) for s in range(q) for t in range(q) if (1 + sign * s * t * ep) % q == 0]
    for s0, t0 in bad[:4]:
        dim, k = nilpotence_witness(p, q, s0, t0)
        assert k is not None and 0 < dim < p * p
    dim, k = nilpotence_witness(p, q, 0, 0)
    assert k is None and dim == p * p


# --- specializations ------------------------------------------------------------


@pytest.mark.parametrize("p,m,u,b", [(3, 7, 2, 3), (3, 9, 1, 2), (5, 11, 2, 3)])
def test_cyclic_specialization(p, m, u, b):
    A, image, checks = specialize_cyclic(p, u, b, RingCtx(quotient(p, m)))
    assert checks["relation"] and checks["x^p -> b"]
    assert checks["y^p -> u/b"] and checks["y^p -> (-1)^(p-1) u/b"]
    assert checks["beta alpha beta^-1 = rho alpha + 1"]
    w = QWeylElem.word(p, "xyxxy")
    x, y = image(QWeylElem.x(p)), image(QWeylElem.y(p))
    prod = A.mul(A.mul(A.mul(A.mul(x, y), x), x), y)
    assert image(w) == prod


def test_cyclic_specialization_p2_sign():
    _, _, checks = specialize_cyclic(2, 1, 1, RingCtx(quotient(2, 3)))
    assert checks["y^p -> (-1)^(p-1) u/b"]
    assert not checks["y^p -> u/b"]


@pytest.mark.parametrize("p", [2, 3])
def test_diff_crossed_products_over_fp(p):
    F = RingCtx(quotient(p, None, 1))
    rng = random.Random(p)
    pairs = [(0, 0)] + [(rng.randrange(p), rng.randrange(p)) for _ in range(49)]
    assert all(diff_crossed_product_check(F, c, b)["azumaya"] for c, b in pairs)


@pytest.mark.parametrize("p", [2, 3])
def test_diff_crossed_product_dual_numbers(p):
    D = finite_ctx(quotient(p, None, 1), [("e", 2, "0")])
    e = D.var("e")
    assert diff_crossed_product_check(D, e, 0)["azumaya"]


def test_char_p_bridge():
    """With rho = 1 the relation becomes beta gamma - gamma beta = 1."""
    p = 3
    F = RingCtx(quotient(p, None, 1))
    M = psi_matrix(p, F, 0, 0)
    assert matrix_is_invertible(M, F)


def test_matrix_invertibility_fallback():
    R = RingCtx(quotient(3, 21))  # not local: unit pivots may be missing
    M = [[R.const(3), R.const(7)], [R.const(7), R.const(3)]]
    # det = 9 - 49 = -40, a unit mod 21
    assert matrix_is_invertible(M, R)
    N = [[R.const(3), R.const(0)], [R.const(0), R.const(1)]]
    assert not matrix_is_invertible(N, R)


@pytest.mark.parametrize("p", [2, 3])
def test_brauer_lift(p):
    R = RingCtx(quotient(p, p * p))
    cert = brauer_lift_demo(R, [R.eta()], 0, 0)
    assert cert["ok"], cert


def test_brauer_lift_dual_numbers():
    R = finite_ctx(quotient(3, 9), [("e", 2, "0")])
    cert = brauer_lift_demo(R, [R.eta(), R.var("e")], R.var("e"), 1)
    assert cert["ok"], cert
    assert cert["c_reduced"] == "0"
