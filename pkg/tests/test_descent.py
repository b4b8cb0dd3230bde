import itertools

import pytest

from etalift.cyclotomic import CycInt, quotient
from etalift.descent import (
    RhoFreeExt, TauRing, adjoin_rho, artin_schreier, build_descent_extension,
    build_generic_descent, certify_descent, choose_s, eigen_analysis, epsilon_element,
    epsilon_report, fixed_units_check, generic_tau_ring, lift_without_rho, norm_operator_N,
    norm_recursion_holds, specialize_descent, tau_fixed_ring_check, tau_order_ok,
)
from etalift.ring import RingCtx, RingError, RingHom


@pytest.mark.parametrize("p,s,r", [(3, 2, 1), (5, 2, 3), (7, 3, 104)])
def test_choose_s(p, s, r):
    ch = choose_s(p)
    assert (ch.s, ch.r) == (s, r)
    assert s ** (p - 1) - 1 == p * r and r % p


def test_choose_s_p2_is_trivial():
    tr = adjoin_rho(RingCtx(quotient(2, 4)))
    assert tr.order == 1


def test_adjoin_rho_over_z4_brute_force():
    tr = adjoin_rho(RingCtx(quotient(3, 4)))
    ctx = tr.ctx
    assert tau_order_ok(tr)
    fixed = [x for x in ctx.elements() if tr.tau(x) == x]
    assert len(fixed) == 4
    assert all(x.constant().coeffs[1] == 0 for x in fixed)
    assert tau_fixed_ring_check(tr)


def test_adjoin_rho_residue_field_orders():
    tr = adjoin_rho(RingCtx(quotient(5, 5)))
    rho = tr.ctx.rho()
    assert rho ** 5 == tr.ctx.one() and rho != tr.ctx.one()
    assert tr.order == 4 and tau_order_ok(tr)


def test_adjoin_rho_order_one_flag():
    tr = adjoin_rho(RingCtx(quotient(3, 3)), order_one=True)
    assert tr.order == 1
    with pytest.raises(ValueError):
        adjoin_rho(RingCtx(quotient(3, 9)), order_one=True)


def test_norm_of_zero():
    tr, _, _ = generic_tau_ring(3)
    assert norm_operator_N(tr.ctx.zero(), tr) == tr.ctx.zero()


def test_norm_recursion_generic_p3():
    tr, z, _ = generic_tau_ring(3)
    assert norm_recursion_holds(z, tr)


@pytest.mark.parametrize("coeffs", [(1, 2, 0, 0), (3, 0, 7, 1), (0, 0, 0, 5)])
def test_norm_recursion_p5_specialized(coeffs):
    p = 5
    ch = choose_s(p)
    R = RingCtx(quotient(p, 25))
    tr = TauRing(R, RingHom(R, R, [], base_power=ch.s), ch)
    assert norm_recursion_holds(R.const(CycInt(p, list(coeffs))), tr)


def test_norm_in_characteristic_p_is_twisted_trace():
    """With eta = 0 the operations become linear: N(z) = sum s^(p-2-k) (d^p tau)^k z."""
    p = 5
    ctx = RingCtx(quotient(p, None, 1), ("x",))
    ch = choose_s(p)
    tr = TauRing(ctx, RingHom(ctx, ctx, ctx.gens(), base_power=ch.s), ch)
    ops = tr.ops()
    z = ctx.var("x")
    expected = ctx.zero()
    cur = z
    for k in range(p - 1):
        expected = expected + ch.s ** (p - 2 - k) * cur
        cur = ops.delta_p_tau(cur)
    assert norm_operator_N(z, tr) == expected


@pytest.fixture(scope="module")
def generic3():
    return build_generic_descent(3)


def test_generic_descent_p3(generic3):
    cert = certify_descent(generic3)
    assert all(cert.values()), cert
    assert generic3.tau(generic3.S.rho()) == generic3.S.rho() ** 2


def test_wrong_tau_twist_is_rejected(generic3):
    d = generic3
    S = d.S
    bad = S.gens()[:-1] + [S.coerce(2) * d.theta]
    with pytest.raises(RingError):
        RingHom(S, S, bad, base_power=d.R.choice.s)


def test_p2_generic_descent_refused():
    with pytest.raises(ValueError):
        build_generic_descent(2)


@pytest.fixture(scope="module")
def special9(generic3):
    target = RingCtx(quotient(3, 9))
    return specialize_descent(generic3, target, [1, 0])


def test_specialization_z9(special9):
    d, H, cert = special9
    assert all(cert.values()), cert
    assert d.S.is_finite


def _mod_eta_hom(d):
    Sred = d.S.with_base(quotient(3, None, 1))
    return RingHom(d.S, Sred, Sred.gens())


def test_epsilon_at_z9(special9):
    d, _, _ = special9
    rep = epsilon_report(d, _mod_eta_hom(d))
    assert all(rep.values()), rep
    eps = epsilon_element(d)
    assert d.tau(eps) == eps


def test_fixed_units(special9):
    d, _, _ = special9
    assert fixed_units_check(d)


def test_descent_p5_specialized():
    p = 5
    ch = choose_s(p)
    R = RingCtx(quotient(p, 25))
    tr = TauRing(R, RingHom(R, R, [], base_power=ch.s), ch)
    d = build_descent_extension(tr, R.const(CycInt(p, [1, 2, 0, 0])))
    cert = certify_descent(d)
    assert all(cert.values()), cert


def test_eigen_analysis_mod_3(generic3):
    target = RingCtx(quotient(3, 3))
    d, _, _ = specialize_descent(generic3, target, [1, 0])
    Sred = d.S.with_base(quotient(3, None, 1))
    res = eigen_analysis(d, Sred, RingHom(d.S, Sred, Sred.gens()))
    assert all(v["ok"] for v in res.values()), res


# --- rho-free lifting -----------------------------------------------------------


def _plain_check(min_coeffs, sigma_coeffs, m, p):
    """Independent check of S' = (Z/m)[E]/(E^p - sum c_j E^j) with plain integers.

    Verifies sigma is a well-defined automorphism of order p, sigma(E) - E is a
    unit, the fixed ring is Z/m, and mod p some w has sigma(w) = w + 1.
    """
    def mul(a, b, mod):
        out = [0] * (2 * p - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        for k in range(2 * p - 2, p - 1, -1):
            c = out[k]
            out[k] = 0
            for j, mc in enumerate(min_coeffs):
                out[k - p + j] += c * mc
        return [v % mod for v in out[:p]]

    def power(a, n, mod):
        out = [1] + [0] * (p - 1)
        for _ in range(n):
            out = mul(out, a, mod)
        return out

    def apply_sigma(a, mod):
        img = [c % mod for c in sigma_coeffs]
        out = [0] * p
        pw = [1] + [0] * (p - 1)
        for c in a:
            out = [(o + c * v) % mod for o, v in zip(out, pw)]
            pw = mul(pw, img, mod)
        return out

    E = [0, 1] + [0] * (p - 2)
    sE = apply_sigma(E, m)
    lhs = power(sE, p, m)
    rhs = [0] * p
    pw = [1] + [0] * (p - 1)
    for c in min_coeffs:
        rhs = [(r + c * v) % m for r, v in zip(rhs, pw)]
        pw = mul(pw, sE, m)
    assert lhs == rhs, "sigma(E) does not satisfy the minimal polynomial"
    cur = E
    for _ in range(p):
        cur = apply_sigma(cur, m)
    assert cur == E, "sigma does not have order dividing p"
    elems = [list(v) for v in itertools.product(range(m), repeat=p)]
    diff = [(a - b) % m for a, b in zip(sE, E)]
    assert any(mul(diff, v, m) == [1] + [0] * (p - 1) for v in elems)
    fixed = [v for v in elems if apply_sigma(v, m) == v]
    assert len(fixed) == m and all(not any(v[1:]) for v in fixed)
    small = [list(v) for v in itertools.product(range(p), repeat=p)]
    one = [1] + [0] * (p - 1)
    assert any(apply_sigma(w, p) == [(a + b) % p for a, b in zip(w, one)] for w in small)


@pytest.mark.parametrize("a", [1, 2])
def test_rho_free_lift_z9_to_f3(a):
    R1, R2 = RingCtx(quotient(3, 9)), RingCtx(quotient(3, 3))
    h = RingHom(R1, R2, [])
    ext2 = artin_schreier(R2, a)
    ext1, cert = lift_without_rho(h, ext2)
    assert cert["ok"], cert
    assert all(v for v in ext1.certificate().values())
    _plain_check(ext1.min_coeffs, ext1.sigma_coeffs, 9, 3)
    # reduction mod 3 of the minimal polynomial and sigma agrees with S''
    assert cert["reduces"]["iso"]


@pytest.mark.parametrize("a", [0, 1])
def test_rho_free_lift_p2(a):
    R1, R2 = RingCtx(quotient(2, 4)), RingCtx(quotient(2, 2))
    h = RingHom(R1, R2, [])
    ext1, cert = lift_without_rho(h, artin_schreier(R2, a))
    assert cert["ok"], cert
    _plain_check(ext1.min_coeffs, ext1.sigma_coeffs, 4, 2)


def test_identity_rho_free_lift():
    R = RingCtx(quotient(3, 3))
    ext = artin_schreier(R, 1)
    ext1, cert = lift_without_rho(RingHom(R, R, []), ext)
    assert cert["ok"]
    _plain_check(ext1.min_coeffs, ext1.sigma_coeffs, 3, 3)


def test_rho_free_ext_json():
    ext = RhoFreeExt(RingCtx(quotient(3, 3)), (1, 1, 0), (1, 1, 0))
    assert ext.to_json() == {"min_poly": [1, 1, 0], "sigma": [1, 1, 0], "name": "E"}
    assert all(ext.certificate().values())
