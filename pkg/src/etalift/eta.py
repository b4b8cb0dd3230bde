"""The eta-adic operation calculus.

With phi(x) = 1 + x*eta and phi_p(x) = 1 + x*eta^p, the operations are the
transported products: phi(x (+) y) = phi(x) phi(y), phi(s * a) = phi(a)^s,
and likewise for the ``_p`` versions.  ``pr #_p z`` is the eta^p-coordinate
of (1 + z*eta)^(pr); it is computed once over Z[rho][Z], where eta is a
non-zero-divisor, and then pushed into any ring by substitution.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

from .cyclotomic import CycInt, delta_s, primitive_root_choice, quotient, eta as cyc_eta
from .ring import RingCtx, RingError, RingHom, UnitRequiredError, polynomial_ring


@lru_cache(maxsize=None)
def sharp_polynomial(p: int, pr: int):
    """Coefficients (constant first) of ((1 + Z*eta)^pr - 1) / eta^p in Z[rho][Z]."""
    if pr <= 0 or pr % p:
        raise ValueError(f"{pr} is not a positive multiple of {p}")
    R = polynomial_ring(p, ("Z",))
    Z = R.var("Z")
    top = (1 + Z * R.eta()) ** pr - 1
    q = R.exact_divide_by_eta_power(top, p)
    coeffs = [CycInt.zero(p)] * (pr + 1)
    for m, c in q.terms.items():
        coeffs[m[0]] = c
    return tuple(coeffs)


def _horner(ctx, coeffs, z):
    acc = ctx.zero()
    for c in reversed(coeffs):
        acc = acc * z + ctx.const(c)
    return acc


class EtaOps:
    """The operations (+), (-), *, their ``_p`` analogues, #_p and the twisted tau."""

    def __init__(self, ctx: RingCtx, tau: RingHom | None = None, s: int | None = None):
        self.ctx = ctx
        self.p = p = ctx.p
        self.eta = ctx.eta()
        self.eta_p = self.eta ** p
        self.eta_pm1 = self.eta ** (p - 1)
        self.tau = tau
        if tau is not None and s is None:
            s = tau.s
        self.s = s
        self.delta = ctx.const(delta_s(p, s)) if s is not None else None

    def phi(self, x):
        return 1 + x * self.eta

    def phi_p(self, x):
        return 1 + x * self.eta_p

    def oplus(self, x, y):
        return x + y + x * y * self.eta

    def ominus(self, x, y):
        inv = self.ctx.try_invert(self.phi(y))
        if inv is None:
            raise UnitRequiredError("1 + y*eta is not a unit")
        return (x - y) * inv

    def star(self, n: int, a):
        return self._repeat(n, a, self.oplus)

    def oplus_p(self, x, y):
        return x + y + x * y * self.eta_p

    def ominus_p(self, x, y):
        inv = self.ctx.try_invert(self.phi_p(y))
        if inv is None:
            raise UnitRequiredError("1 + y*eta^p is not a unit")
        return (x - y) * inv

    def star_p(self, n: int, a):
        return self._repeat(n, a, self.oplus_p)

    def _repeat(self, n, a, op):
        if n < 0:
            raise ValueError("multiplier must be non-negative")
        result = self.ctx.zero()
        base = self.ctx.coerce(a)
        while n:
            if n & 1:
                result = op(result, base)
            n >>= 1
            if n:
                base = op(base, base)
        return result

    def sharp_p(self, pr: int, z):
        return _horner(self.ctx, sharp_polynomial(self.p, pr), self.ctx.coerce(z))

    def _need_tau(self):
        if self.tau is None:
            raise RingError("no tau-action installed on this context")

    def delta_tau(self, x):
        self._need_tau()
        return self.delta * self.tau(x)

    def delta_p_tau(self, x):
        self._need_tau()
        return self.delta ** self.p * self.tau(x)


def tau_fixing_vars(ctx: RingCtx, s: int) -> RingHom:
    """tau acting as rho -> rho^s on coefficients and fixing every variable."""
    return RingHom(ctx, ctx, ctx.gens(), base_power=s)


# ---------------------------------------------------------------------------
# appendix identity suite

IDENTITIES = {
    1: "phi_p(x) = phi(x eta^(p-1))",
    2: "s*(x (+) y) = (s*x) (+) (s*y)",
    3: "s*_p(x (+)_p y) = (s*_p x) (+)_p (s*_p y)",
    4: "(pr #_p x) eta^(p-1) = pr * x",
    5: "p *_p x = p #_p (x eta^(p-1))",
    6: "pr #_p x = p #_p (r * x) = r *_p (p #_p x)",
    7: "pr #_p (a (+) b) = (pr #_p a) (+)_p (pr #_p b)",
    8: "pr #_p (a (-) b) = (pr #_p a) (-)_p (pr #_p b)",
    9: "pr #_p (t * x) = t *_p (pr #_p x)",
    10: "pr #_p (x eta^(p-1)) = pr *_p x",
    11: "(a (+)_p b) eta^(p-1) = a eta^(p-1) (+) b eta^(p-1)",
    12: "(t *_p x) eta^(p-1) = t * (x eta^(p-1))",
    13: "dtau(x (+) y) = dtau(x) (+) dtau(y)",
    14: "d^p tau(x (+)_p y) = d^p tau(x) (+)_p d^p tau(y)",
    15: "dtau(t * x) = t * dtau(x)",
    16: "d^p tau(t *_p x) = t *_p d^p tau(x)",
    17: "d^p tau(pr #_p x) = pr #_p dtau(x)",
    18: "dtau(x eta^(p-1)) = d^p tau(x) eta^(p-1)",
}

TAU_IDENTITIES = frozenset(range(13, 19))


def _identity_pairs(k, ops, x, y, ts, rs):
    """Yield (parameter label, lhs, rhs) for identity ``k`` at elements x, y."""
    p = ops.p
    e1 = ops.eta_pm1
    if k == 1:
        yield "", ops.phi_p(x), ops.phi(x * e1)
    elif k == 2:
        for s in ts:
            yield f"s={s}", ops.star(s, ops.oplus(x, y)), ops.oplus(ops.star(s, x), ops.star(s, y))
    elif k == 3:
        for s in ts:
            yield (f"s={s}", ops.star_p(s, ops.oplus_p(x, y)),
                   ops.oplus_p(ops.star_p(s, x), ops.star_p(s, y)))
    elif k == 4:
        for r in rs:
            yield f"r={r}", ops.sharp_p(p * r, x) * e1, ops.star(p * r, x)
    elif k == 5:
        yield "", ops.star_p(p, x), ops.sharp_p(p, x * e1)
    elif k == 6:
        for r in rs:
            lhs = ops.sharp_p(p * r, x)
            yield f"r={r} (first)", lhs, ops.sharp_p(p, ops.star(r, x))
            yield f"r={r} (second)", lhs, ops.star_p(r, ops.sharp_p(p, x))
    elif k == 7:
        for r in rs:
            yield (f"r={r}", ops.sharp_p(p * r, ops.oplus(x, y)),
                   ops.oplus_p(ops.sharp_p(p * r, x), ops.sharp_p(p * r, y)))
    elif k == 8:
        for r in rs:
            yield (f"r={r}", ops.sharp_p(p * r, ops.ominus(x, y)),
                   ops.ominus_p(ops.sharp_p(p * r, x), ops.sharp_p(p * r, y)))
    elif k == 9:
        for r in rs:
            for t in ts:
                yield (f"r={r}, t={t}", ops.sharp_p(p * r, ops.star(t, x)),
                       ops.star_p(t, ops.sharp_p(p * r, x)))
    elif k == 10:
        for r in rs:
            yield f"r={r}", ops.sharp_p(p * r, x * e1), ops.star_p(p * r, x)
    elif k == 11:
        yield "", ops.oplus_p(x, y) * e1, ops.oplus(x * e1, y * e1)
    elif k == 12:
        for t in ts:
            yield f"t={t}", ops.star_p(t, x) * e1, ops.star(t, x * e1)
    elif k == 13:
        yield "", ops.delta_tau(ops.oplus(x, y)), ops.oplus(ops.delta_tau(x), ops.delta_tau(y))
    elif k == 14:
        yield ("", ops.delta_p_tau(ops.oplus_p(x, y)),
               ops.oplus_p(ops.delta_p_tau(x), ops.delta_p_tau(y)))
    elif k == 15:
        for t in ts:
            yield f"t={t}", ops.delta_tau(ops.star(t, x)), ops.star(t, ops.delta_tau(x))
    elif k == 16:
        for t in ts:
            yield f"t={t}", ops.delta_p_tau(ops.star_p(t, x)), ops.star_p(t, ops.delta_p_tau(x))
    elif k == 17:
        for r in rs:
            yield (f"r={r}", ops.delta_p_tau(ops.sharp_p(p * r, x)),
                   ops.sharp_p(p * r, ops.delta_tau(x)))
    elif k == 18:
        yield "", ops.delta_tau(x * e1), ops.delta_p_tau(x) * e1
    else:
        raise ValueError(f"unknown identity {k}")


def symbolic_contexts(p: int):
    """Generic rings for the symbolic checks.

    Returns (plain ops with variables x, y), (ops localized at 1 + y*eta) and
    (tau-equipped ops whose x, y are generic Z[rho]-combinations of
    tau-fixed coordinates).
    """
    s, _ = primitive_root_choice(p)
    G = polynomial_ring(p, ("x", "y"))
    plain = (EtaOps(G), G.var("x"), G.var("y"))
    L = G.localize(1 + G.var("y") * G.eta())
    loc = (EtaOps(L), L.var("x"), L.var("y"))
    n = p - 1
    names = tuple(f"x{i}" for i in range(n)) + tuple(f"y{i}" for i in range(n))
    T = polynomial_ring(p, names)
    rho = T.rho()
    x = sum((T.var(f"x{i}") * rho ** i for i in range(n)), T.zero())
    y = sum((T.var(f"y{i}") * rho ** i for i in range(n)), T.zero())
    tau = (EtaOps(T, tau_fixing_vars(T, s), s), x, y)
    return plain, loc, tau


def default_specializations(p: int):
    """Finite Z[rho]-algebras used for the pointwise checks (all tau-stable)."""
    q = next(q for q in range(p + 1, 10 * p + 50)
             if all(q % d for d in range(2, q)) and q % p == 1 and q != p)
    return [
        (f"Z[rho]/({p}^2)", RingCtx(quotient(p, p * p))),
        (f"Z[rho]/({p})", RingCtx(quotient(p, p))),
        (f"Z[rho]/(eta) = F_{p}", RingCtx(quotient(p, None, 1))),
        (f"Z[rho]/({q})", RingCtx(quotient(p, q))),
    ]


def _random_elem(ctx, rng):
    p = ctx.p
    bound = ctx.base.modulus or 50
    return ctx.const(CycInt(p, [rng.randrange(bound) for _ in range(p - 1)]))


def _threads():
    try:
        return max(1, int(os.environ.get("ETALIFT_THREADS", "1")))
    except ValueError:
        return 1


def appendix_identity_suite(p: int, samples: int = 5, seed: int = 0, specializations=None,
                            ts=None, rs=(1, 2)):
    """Check identities (1)-(18) symbolically and at finite specializations.

    Failures are reported as data with a counterexample, never raised.
    """
    if ts is None:
        ts = tuple(range(0, 2 * p + 1))
    plain, loc, tau = symbolic_contexts(p)
    s, _ = primitive_root_choice(p)
    specs = default_specializations(p) if specializations is None else specializations

    def run(k):
        checks = []
        failure = None
        if k in TAU_IDENTITIES:
            sym = tau
        elif k == 8:
            sym = loc
        else:
            sym = plain
        ops, x, y = sym
        n_ok = 0
        for label, lhs, rhs in _identity_pairs(k, ops, x, y, ts, rs):
            if lhs == rhs:
                n_ok += 1
            elif failure is None:
                failure = {"context": "generic", "params": label, "lhs": str(lhs), "rhs": str(rhs)}
        checks.append({"context": "generic", "cases": n_ok, "passed": failure is None})
        rng = random.Random(f"{seed}:{p}:{k}")
        for name, ctx in specs:
            ops = EtaOps(ctx, tau_fixing_vars(ctx, s), s)
            ok = True
            cases = 0
            for _ in range(samples):
                x = _random_elem(ctx, rng)
                y = _random_elem(ctx, rng)
                if k == 8:
                    tries = 0
                    while not ctx.is_unit(ops.phi(y)) and tries < 100:
                        y = _random_elem(ctx, rng)
                        tries += 1
                for label, lhs, rhs in _identity_pairs(k, ops, x, y, ts, rs):
                    cases += 1
                    if lhs != rhs:
                        ok = False
                        if failure is None:
                            failure = {"context": name, "params": label, "x": str(x), "y": str(y),
                                       "lhs": str(lhs), "rhs": str(rhs)}
            checks.append({"context": name, "cases": cases, "passed": ok})
        entry = {"identity_index": k, "statement": IDENTITIES[k],
                 "status": "pass" if failure is None else "fail", "checks": checks}
        if failure is not None:
            entry["counterexample"] = failure
        return entry

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(run, sorted(IDENTITIES)))
    results.sort(key=lambda e: e["identity_index"])
    return {
        "p": p,
        "seed": seed,
        "samples": samples,
        "t_values": list(ts),
        "r_values": list(rs),
        "specializations": [name for name, _ in specs],
        "identities": results,
        "passed": sum(e["status"] == "pass" for e in results),
        "total": len(results),
    }
