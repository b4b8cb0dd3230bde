"""Presented commutative Z[rho]-algebras with unique normal forms.

A :class:`RingCtx` is built in layers:

* a coefficient ring Z[rho]/I (:class:`~etalift.cyclotomic.BaseRing`),
* polynomial variables in a fixed order,
* optionally a localization at one element ``f`` of the free variables
  (only over the exact base Z[rho], where the polynomial ring is a domain),
* monic power rules ``v^n -> rhs`` whose right-hand side only involves
  earlier variables and lower powers of ``v``.

Elements are stored as ``numerator / f^k`` with the numerator reduced by the
power rules and ``k`` minimal.  That form is unique, so equality is a plain
comparison of term maps.
"""

from __future__ import annotations

import ast
from functools import reduce
from itertools import product

from . import intlin
from .cyclotomic import (
    BaseRing,
    ConsistencyError,
    CycInt,
    DivisibilityError,
    eta as cyc_eta,
)


class RingError(Exception):
    pass


class UndecidableError(RingError):
    """Unit status cannot be decided in this presentation."""


class UnitRequiredError(RingError):
    """An operation needed an inverse that does not exist."""


# ---------------------------------------------------------------------------
# raw polynomial helpers (dict: exponent tuple -> CycInt)


def _padd(a, b, base, sign=1):
    out = dict(a)
    for m, c in b.items():
        v = out.get(m)
        v = c * sign if v is None else v + c * sign
        v = base.reduce(v)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pscale(a, c, base):
    out = {}
    for m, v in a.items():
        w = base.reduce(v * c)
        if w:
            out[m] = w
    return out


def _pmul_raw(a, b, base):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            v = out.get(m)
            out[m] = c1 * c2 if v is None else v + c1 * c2
    res = {}
    for m, v in out.items():
        v = base.reduce(v)
        if v:
            res[m] = v
    return res


def _lead(poly):
    return max(poly)


def _pdivide(num, den, p):
    """Exact quotient num/den in Z[rho][vars] or None (lex leading terms)."""
    if not num:
        return {}
    lt = _lead(den)
    lc = den[lt]
    q = {}
    r = dict(num)
    exact = BaseRing(p)
    while r:
        m = _lead(r)
        diff = tuple(x - y for x, y in zip(m, lt))
        if any(d < 0 for d in diff):
            return None
        try:
            c = r[m].exact_div(lc)
        except DivisibilityError:
            return None
        q[diff] = c
        r = _padd(r, _pmul_raw({diff: c}, den, exact), exact, -1)
    return q


def _fmt_mono(names, m):
    parts = []
    for nm, e in zip(names, m):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def _fmt_poly(names, poly):
    if not poly:
        return "0"
    parts = []
    for m in sorted(poly, reverse=True):
        c = poly[m]
        mono = _fmt_mono(names, m)
        cs = str(c)
        if not mono:
            parts.append(cs)
        elif cs == "1":
            parts.append(mono)
        elif cs == "-1":
            parts.append("-" + mono)
        elif len(c.coeffs) > 1 and sum(1 for x in c.coeffs if x) > 1:
            parts.append(f"({cs})*{mono}")
        else:
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------


class RingCtx:
    def __init__(self, base: BaseRing, vars=(), rules=None, loc=None, inv_names=None):
        self.base = base
        self.p = base.p
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.nv = len(self.vars)
        self.index = {v: i for i, v in enumerate(self.vars)}
        # rules: var index -> (n, rhs poly)
        self.rules = dict(rules or {})
        self.loc = loc  # poly in free vars or None
        self.inv_names = dict(inv_names or {})  # name -> (num poly, k)
        if loc is not None:
            if base.is_finite:
                raise ValueError("localization is only supported over Z[rho]")
            used = {i for m in loc for i, e in enumerate(m) if e}
            ruled = set(self.rules)
            if used & ruled or (ruled and used and max(used) > min(ruled)):
                raise ValueError("localized element must involve only free leading variables")
        for i, (n, rhs) in self.rules.items():
            for m in rhs:
                if m[i] >= n or any(m[j] for j in range(i + 1, self.nv)):
                    raise ValueError(f"rule for {self.vars[i]} is not triangular")
        self._key = (base.key(), self.vars,
                     tuple(sorted((i, n, tuple(sorted(r.items(), key=lambda t: t[0])))
                                  for i, (n, r) in self.rules.items())),
                     None if loc is None else tuple(sorted(loc.items())))
        self._hash = hash((base.key(), self.vars))
        self._fpow = [{(0,) * self.nv: CycInt.one(self.p)}]

    # identity
    def __eq__(self, other):
        return self is other or (isinstance(other, RingCtx) and self._key == other._key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"RingCtx({self.describe()})"

    def describe(self):
        s = self.base.describe()
        if self.vars:
            s += f" [{', '.join(self.vars)}]"
        for i, (n, rhs) in sorted(self.rules.items()):
            s += f"; {self.vars[i]}^{n} = {_fmt_poly(self.vars, rhs)}"
        if self.loc is not None:
            s += f"; 1/({_fmt_poly(self.vars, self.loc)})"
        return s

    @property
    def is_finite(self):
        return self.base.is_finite and self.loc is None and len(self.rules) == self.nv

    @property
    def is_exact(self):
        return self.base.is_exact

    # builders
    def extend(self, *names) -> "RingCtx":
        """Append free variables (power rules and localization are kept)."""
        ctx = RingCtx(self.base, self.vars + names,
                      {i: (n, _pad(r, len(names))) for i, (n, r) in self.rules.items()},
                      None if self.loc is None else _pad(self.loc, len(names)),
                      {k: (_pad(num, len(names)), kk) for k, (num, kk) in self.inv_names.items()})
        return ctx

    def with_rule(self, var: str, n: int, rhs: "RingElem") -> "RingCtx":
        if rhs.ctx != self:
            rhs = self.embed(rhs)
        if rhs.den:
            raise ValueError("rule right-hand side must be a polynomial")
        i = self.index[var]
        rules = dict(self.rules)
        rules[i] = (n, rhs.terms)
        ctx = RingCtx(self.base, self.vars, rules, self.loc, self.inv_names)
        return ctx

    def localize(self, f: "RingElem", name: str | None = None) -> "RingCtx":
        """Adjoin an inverse of the polynomial ``f`` (optionally named)."""
        if f.ctx != self:
            f = self.embed(f)
        if f.den:
            raise ValueError("can only localize at a polynomial")
        inv = dict(self.inv_names)
        if self.loc is None:
            newloc = f.terms
            # previous symbols cannot exist
        else:
            newloc = _pmul_raw(self.loc, f.terms, self.base)
            # old symbol num/f0^k == num*f^k/(f0 f)^k
            fk = {}
            for k2, (num, k) in inv.items():
                inv[k2] = (_pmul_raw(num, _ppow(f.terms, k, self.base, self.nv), self.base), k)
        ctx = RingCtx(self.base, self.vars, self.rules, newloc, inv)
        if name is not None:
            if self.loc is None:
                ctx.inv_names[name] = ({(0,) * self.nv: CycInt.one(self.p)}, 1)
            else:
                ctx.inv_names[name] = (self.loc, 1)
        return ctx

    def with_base(self, base: BaseRing) -> "RingCtx":
        """Same presentation over another coefficient ring (no localization)."""
        if self.loc is not None:
            raise ValueError("cannot change the base of a localized ring")
        rules = {i: (n, {m: base.reduce(c) for m, c in r.items() if base.reduce(c)})
                 for i, (n, r) in self.rules.items()}
        return RingCtx(base, self.vars, rules)

    def prefix(self, k: int) -> "RingCtx":
        rules = {i: (n, {m[:k]: c for m, c in r.items()})
                 for i, (n, r) in self.rules.items() if i < k}
        loc = None
        if self.loc is not None and all(not any(m[k:]) for m in self.loc):
            loc = {m[:k]: c for m, c in self.loc.items()}
        return RingCtx(self.base, self.vars[:k], rules, loc)

    # element constructors
    def zero(self):
        return RingElem(self, {}, 0)

    def one(self):
        return self.const(1)

    def const(self, c):
        if isinstance(c, int):
            c = CycInt.from_int(self.p, c)
        c = self.base.reduce(c)
        return RingElem(self, {(0,) * self.nv: c} if c else {}, 0)

    def rho(self):
        return self.const(CycInt.rho_power(self.p, 1))

    def eta(self):
        return self.const(cyc_eta(self.p))

    def var(self, name):
        if name in self.inv_names:
            num, k = self.inv_names[name]
            return RingElem(self, dict(num), k, normalize=True)
        i = self.index[name]
        m = tuple(1 if j == i else 0 for j in range(self.nv))
        one = self.base.reduce(CycInt.one(self.p))
        return RingElem(self, self._reduce({m: one} if one else {}), 0)

    def gens(self):
        return [self.var(v) for v in self.vars]

    def coerce(self, x):
        if isinstance(x, RingElem):
            if x.ctx == self:
                return x
            return self.embed(x)
        if isinstance(x, (int, CycInt)):
            return self.const(x)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def embed(self, x: "RingElem") -> "RingElem":
        """Move an element of a compatible context into this one by variable name."""
        src = x.ctx
        if src == self:
            return RingElem(self, dict(x.terms), x.den)
        pos = []
        for v in src.vars:
            if v not in self.index:
                if any(m[src.index[v]] for m in x.terms):
                    raise RingError(f"variable {v} missing in target context")
                pos.append(None)
            else:
                pos.append(self.index[v])
        terms = {}
        for m, c in x.terms.items():
            nm = [0] * self.nv
            for e, j in zip(m, pos):
                if e:
                    nm[j] = e
            c = self.base.reduce(c)
            if c:
                t = tuple(nm)
                terms[t] = self.base.reduce(terms[t] + c) if t in terms else c
        num = RingElem(self, self._reduce(terms), 0)
        if x.den:
            if src.loc is None:
                raise ConsistencyError("denominator without localization")
            f = src.embed_free(src.loc, self)
            finv = self.try_invert(RingElem(self, self._reduce(f), 0))
            if finv is None:
                raise UnitRequiredError("localized element is not a unit in the target")
            num = num * finv ** x.den
        return num

    def embed_free(self, poly, target):
        out = {}
        for m, c in poly.items():
            nm = [0] * target.nv
            for v, e in zip(self.vars, m):
                if e:
                    nm[target.index[v]] = e
            out[tuple(nm)] = c
        return out

    # normal forms
    def _reduce(self, poly):
        if not self.rules:
            return {m: c for m, c in poly.items() if c}
        base = self.base
        poly = dict(poly)
        order = sorted(self.rules, reverse=True)
        while True:
            hit = None
            for m in poly:
                for i in order:
                    if m[i] >= self.rules[i][0]:
                        hit = (m, i)
                        break
                if hit:
                    break
            if hit is None:
                return poly
            m, i = hit
            c = poly.pop(m)
            n, rhs = self.rules[i]
            rest = list(m)
            rest[i] -= n
            rest = tuple(rest)
            for rm, rc in rhs.items():
                t = tuple(a + b for a, b in zip(rest, rm))
                v = poly.get(t)
                v = base.reduce(c * rc if v is None else v + c * rc)
                if v:
                    poly[t] = v
                else:
                    poly.pop(t, None)

    def _fpow_get(self, k):
        while len(self._fpow) <= k:
            self._fpow.append(_pmul_raw(self._fpow[-1], self.loc, self.base))
        return self._fpow[k]

    def _normalize(self, terms, den):
        if den and self.loc is not None:
            while den and terms:
                q = _pdivide(terms, self.loc, self.p)
                if q is None:
                    break
                terms = q
                den -= 1
            if not terms:
                den = 0
        return terms, den

    # units
    def try_invert(self, a: "RingElem"):
        """Inverse of ``a`` or None; raises UndecidableError when unknowable."""
        a = self.coerce(a)
        inv_num = self._invert_poly(a.terms)
        if inv_num is None:
            return None
        if a.den:
            inv_num = inv_num * RingElem(self, dict(self._fpow_get(a.den)), 0)
        return inv_num

    def is_unit(self, a):
        return self.try_invert(a) is not None

    def _invert_poly(self, P):
        if not P:
            return None
        used = {i for m in P for i, e in enumerate(m) if e}
        if not used:
            c = next(iter(P.values()))
            inv = self.base.try_invert(c)
            if inv is not None:
                return self.const(inv)
            if self.loc is None:
                return None
            return self._invert_by_loc(P)
        last = max(used)
        if last in self.rules:
            return self._invert_by_norm(P, last)
        ruled_before = any(i < last for i in self.rules)
        if self.base.is_finite or ruled_before:
            raise UndecidableError("unit status undecidable: free variable over a non-reduced layer")
        if self.loc is not None:
            return self._invert_by_loc(P)
        return None

    def _invert_by_loc(self, P):
        if self.loc is None:
            return None
        deg = max(sum(m) for m in P)
        fdeg = max(sum(m) for m in self.loc)
        start = -(-deg // fdeg) if fdeg else 0
        for k in range(start, start + deg + 4):
            q = _pdivide(self._fpow_get(k), P, self.p)
            if q is not None:
                return RingElem(self, q, k, normalize=True)
        return None

    def _invert_by_norm(self, P, last):
        n = self.rules[last][0]
        sub = self.prefix(last)
        a = RingElem(self, P, 0)
        v = self.var(self.vars[last])
        cols = []
        w = a
        for i in range(n):
            col = [sub.zero() for _ in range(n)]
            for m, c in w.terms.items():
                d = m[last]
                col[d] = col[d] + RingElem(sub, {m[:last]: c}, 0)
            cols.append(col)
            w = w * v
        M = [[cols[j][i] for j in range(n)] for i in range(n)]
        cp = charpoly(M, sub)
        cn = cp[n]
        cn_inv = sub.try_invert(cn)
        if cn_inv is None:
            return None
        acc = self.zero()
        for i in range(n):
            acc = acc * a + self.embed(cp[i])
        inv = -(acc * self.embed(cn_inv))
        if inv * a != self.one():
            raise ConsistencyError("norm-based inverse failed")
        return inv

    # exact division by eta^k (only where eta is a non-zero-divisor)
    def exact_divide_by_eta_power(self, a, k):
        if not self.base.is_exact:
            raise RingError("division by eta requires the coefficient ring Z[rho]")
        a = self.coerce(a)
        ek = cyc_eta(self.p) ** k
        try:
            terms = {m: c.exact_div(ek) for m, c in a.terms.items()}
        except DivisibilityError as exc:
            raise DivisibilityError(f"element is not divisible by eta^{k}") from exc
        return RingElem(self, terms, a.den, normalize=True)

    # finite rings as Z-modules
    def monomials(self):
        if not self.is_finite:
            raise RingError("monomial basis requires a finite ring")
        ns = [self.rules[i][0] for i in range(self.nv)]
        return [tuple(m) for m in product(*[range(n) for n in ns])]

    def zvec(self, a):
        out = []
        for m in self.monomials():
            c = a.terms.get(m)
            out.extend(c.coeffs if c is not None else (0,) * (self.p - 1))
        return out

    def from_zvec(self, vec):
        n = self.p - 1
        terms = {}
        for t, m in enumerate(self.monomials()):
            c = self.base.reduce(CycInt(self.p, vec[t * n:(t + 1) * n]))
            if c:
                terms[m] = c
        return RingElem(self, terms, 0)

    def lattice(self):
        n = self.p - 1
        k = len(self.monomials())
        rows = []
        for t in range(k):
            for r in self.base.hnf:
                row = [0] * (n * k)
                row[t * n:(t + 1) * n] = r
                rows.append(row)
        return rows

    def order(self):
        return self.base.order ** len(self.monomials())

    def elements(self, limit=10 ** 6):
        if self.order() > limit:
            raise RingError(f"ring too large to enumerate ({self.order()} elements)")
        mons = self.monomials()
        reps = self.base.elements()
        for combo in product(reps, repeat=len(mons)):
            yield RingElem(self, {m: c for m, c in zip(mons, combo) if c}, 0)

    # parsing
    def parse(self, text: str) -> "RingElem":
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        return self._eval_ast(tree.body)

    def _eval_ast(self, node):
        if isinstance(node, ast.BinOp):
            left = self._eval_ast(node.left)
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                    raise ValueError("exponent must be an integer literal")
                return left ** node.right.value
            right = self._eval_ast(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            raise ValueError(f"unsupported operator {type(node.op).__name__}")
        if isinstance(node, ast.UnaryOp):
            val = self._eval_ast(node.operand)
            if isinstance(node.op, ast.USub):
                return -val
            if isinstance(node.op, ast.UAdd):
                return val
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return self.const(node.value)
        if isinstance(node, ast.Name):
            if node.id == "rho":
                return self.rho()
            if node.id == "eta":
                return self.eta()
            if node.id in self.index or node.id in self.inv_names:
                return self.var(node.id)
            raise ValueError(f"unknown name {node.id!r}")
        raise ValueError("unsupported expression")


def _pad(poly, extra):
    return {m + (0,) * extra: c for m, c in poly.items()}


def _ppow(poly, k, base, nv):
    out = {(0,) * nv: CycInt.one(base.p)}
    for _ in range(k):
        out = _pmul_raw(out, poly, base)
    return out


class RingElem:
    __slots__ = ("ctx", "terms", "den")

    def __init__(self, ctx, terms, den=0, normalize=False):
        if normalize:
            terms, den = ctx._normalize(ctx._reduce(terms), den)
        self.ctx = ctx
        self.terms = terms
        self.den = den

    def _other(self, other):
        if isinstance(other, RingElem):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise RingError("context mismatch")
            return other
        if isinstance(other, (int, CycInt)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        base = ctx.base
        if self.den == other.den:
            return RingElem(ctx, _padd(self.terms, other.terms, base), self.den,
                            normalize=bool(self.den))
        k = max(self.den, other.den)
        a = _pmul_raw(self.terms, ctx._fpow_get(k - self.den), base)
        b = _pmul_raw(other.terms, ctx._fpow_get(k - other.den), base)
        return RingElem(ctx, _padd(a, b, base), k, normalize=True)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(self.ctx, {m: self.ctx.base.reduce(-c) for m, c in self.terms.items()},
                        self.den)

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, CycInt)):
            terms, den = self.ctx._normalize(_pscale(self.terms, other, self.ctx.base), self.den)
            return RingElem(self.ctx, terms, den)
        other = self._other(other)
        if other is NotImplemented:
            return other
        ctx = self.ctx
        terms = ctx._reduce(_pmul_raw(self.terms, other.terms, ctx.base))
        den = self.den + other.den
        if den:
            terms, den = ctx._normalize(terms, den)
        return RingElem(ctx, terms, den)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            inv = self.ctx.try_invert(self)
            if inv is None:
                raise UnitRequiredError("negative power of a non-unit")
            return inv ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, CycInt)):
            other = self.ctx.const(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.ctx == other.ctx and self.den == other.den and self.terms == other.terms

    def __hash__(self):
        return hash((self.den, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.den and all(not any(m) for m in self.terms)

    def constant(self):
        """The constant coefficient as a CycInt (polynomials only)."""
        return self.terms.get((0,) * self.ctx.nv, CycInt.zero(self.ctx.p))

    def degree_in(self, var):
        i = self.ctx.index[var]
        return max((m[i] for m in self.terms), default=-1)

    def coefficients_in(self, var):
        """Split a polynomial by powers of ``var``: {deg: element free of var}."""
        if self.den:
            raise RingError("split of a fraction")
        i = self.ctx.index[var]
        out = {}
        for m, c in self.terms.items():
            d = m[i]
            mm = m[:i] + (0,) + m[i + 1:]
            out.setdefault(d, {})[mm] = c
        return {d: RingElem(self.ctx, t, 0) for d, t in out.items()}

    def __repr__(self):
        return f"RingElem({self})"

    def __str__(self):
        s = _fmt_poly(self.ctx.vars, self.terms)
        if self.den:
            f = _fmt_poly(self.ctx.vars, self.ctx.loc)
            s = f"({s})/({f})" + (f"^{self.den}" if self.den > 1 else "")
        return s

    def to_json(self):
        return {
            "vars": list(self.ctx.vars),
            "terms": [[list(m), [str(x) for x in c.coeffs]] for m, c in sorted(self.terms.items())],
            "den_power": self.den,
            "text": str(self),
        }


# ---------------------------------------------------------------------------
# division-free linear algebra over a commutative RingCtx


def charpoly(M, ctx):
    """Coefficients [1, c1, ..., cn] of det(X*I - M), division-free (Berkowitz)."""
    n = len(M)
    if n == 0:
        return [ctx.one()]
    a = M[0][0]
    R = M[0][1:]
    C = [M[i][0] for i in range(1, n)]
    A1 = [row[1:] for row in M[1:]]
    col = [ctx.one(), -a]
    vec = C
    for _ in range(n - 1):
        col.append(-reduce(lambda s, t: s + t, (r * v for r, v in zip(R, vec)), ctx.zero()))
        vec = [reduce(lambda s, t: s + t, (x * v for x, v in zip(row, vec)), ctx.zero())
               for row in A1]
    sub = charpoly(A1, ctx)
    out = []
    for i in range(n + 1):
        acc = ctx.zero()
        for j in range(min(i, n - 1) + 1):
            if i - j < len(col):
                acc = acc + col[i - j] * sub[j]
        out.append(acc)
    return out


def det(M, ctx):
    n = len(M)
    c = charpoly(M, ctx)[n]
    return c if n % 2 == 0 else -c


def bareiss_det(M, ctx):
    """Fraction-free determinant over an exact (domain) context."""
    n = len(M)
    A = [list(row) for row in M]
    sign = 1
    prev = ctx.one()
    for k in range(n - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if swap is None:
                return ctx.zero()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = exact_quotient(num, prev)
            A[i][k] = ctx.zero()
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return d if sign == 1 else -d


def exact_quotient(a, b):
    """a / b for polynomials over Z[rho] (raises when not exact)."""
    ctx = a.ctx
    if a.den or b.den:
        raise RingError("exact_quotient on fractions")
    q = _pdivide(a.terms, b.terms, ctx.p)
    if q is None:
        raise DivisibilityError("inexact polynomial division")
    return RingElem(ctx, q, 0)


# ---------------------------------------------------------------------------


class RingHom:
    """Z[rho]-algebra map given by images of variables.

    ``base_power`` twists the coefficient map by rho -> rho^s (used for the
    automorphism tau); the default is the canonical map.
    """

    def __init__(self, source: RingCtx, target: RingCtx, images, base_power: int = 1,
                 check: bool = True):
        self.source = source
        self.target = target
        if isinstance(images, dict):
            images = [images.get(v, None) for v in source.vars]
            images = [target.var(v) if im is None else im for v, im in zip(source.vars, images)]
        self.images = [target.coerce(im) for im in images]
        self.s = base_power % source.p if source.p > 2 else 1
        for g in source.base.gens:
            if target.base.reduce(g.tau(self.s)):
                raise RingError("coefficient ideal does not map into the target ideal")
        self._finv = None
        if check:
            self.verify()

    def _coef(self, c):
        return self.target.const(c.tau(self.s) if self.s != 1 else c)

    def _poly(self, poly):
        tgt = self.target
        cache = {}
        acc_terms = {}
        out = tgt.zero()
        for m, c in poly.items():
            term = self._coef(c)
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = self.images[i] ** e
                    term = term * cache[key]
            out = out + term
        return out

    def __call__(self, a: RingElem) -> RingElem:
        if a.ctx != self.source:
            raise RingError("element is not in the source context")
        out = self._poly(a.terms)
        if a.den:
            out = out * self.loc_inverse() ** a.den
        return out

    def loc_inverse(self):
        if self._finv is None:
            f = self._poly(self.source.loc)
            inv = self.target.try_invert(f)
            if inv is None:
                raise UnitRequiredError("image of the localized element is not a unit")
            self._finv = inv
        return self._finv

    def verify(self):
        for i, (n, rhs) in self.source.rules.items():
            lhs = self.images[i] ** n
            if lhs != self._poly(rhs):
                raise RingError(f"relation for {self.source.vars[i]} does not map to zero")
        if self.source.loc is not None:
            self.loc_inverse()

    def compose(self, other: "RingHom") -> "RingHom":
        """self after other."""
        return RingHom(other.source, self.target, [self(im) for im in other.images],
                       base_power=(self.s * other.s), check=False)


def identity_hom(ctx):
    return RingHom(ctx, ctx, ctx.gens(), check=False)


def polynomial_ring(p, vars=(), base=None):
    return RingCtx(base or BaseRing(p), vars)


def finite_ctx(base, var_rules):
    """Finite ring base[v1,...]/(v_i^n_i - rhs_i) from a list of (name, n, rhs-text)."""
    ctx = RingCtx(base, tuple(v for v, _, _ in var_rules))
    for v, n, rhs in var_rules:
        ctx = ctx.with_rule(v, n, ctx.parse(rhs) if isinstance(rhs, str) else ctx.coerce(rhs))
    return ctx


def load_ctx(data) -> RingCtx:
    """Build a context from the JSON descriptor used by the CLI."""
    b = data["base"]
    p = int(b["p"])
    gens = []
    if b.get("m"):
        gens.append(int(b["m"]))
    if b.get("eta_power") is not None:
        gens.append(cyc_eta(p) ** int(b["eta_power"]))
    for extra in b.get("extra", []):
        gens.append(CycInt(p, [int(x) for x in extra]))
    base = BaseRing(p, gens)
    ctx = RingCtx(base, tuple(data.get("vars", [])))
    for num, name in data.get("inverses", []):
        ctx = ctx.localize(ctx.parse(num), name)
    rules = data.get("power_rules", [])
    for rule in rules:
        if isinstance(rule, dict):
            v, n, rhs = rule["var"], int(rule["n"]), rule.get("rhs", "0")
        else:
            v, n, rhs = rule[0], int(rule[1]), rule[2] if len(rule) > 2 else "0"
        ctx = ctx.with_rule(v, n, ctx.parse(rhs))
    return ctx
