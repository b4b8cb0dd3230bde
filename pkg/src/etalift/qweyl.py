"""The algebra B = Z[rho]<x,y>/(xy - rho*yx - 1).

Elements are stored in the normal form sum c_ij y^i x^j.  Over the centre
C = Z[rho][s,t] (s = x^p, t = y^p) the algebra is free on y^i x^j with
0 <= i, j < p; the Azumaya map psi(a (x) b)(z) = a z b is assembled from
that basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cyclotomic import CycInt, check_prime, delta_s, is_prime
from .galois import GaloisExt, build_extension
from .intlin import lattice_index
from .ring import (RingCtx, RingElem, RingError, RingHom, bareiss_det, exact_quotient,
                   polynomial_ring)
from .cyclotomic import BaseRing, DivisibilityError

SYMBOLIC_MAX_P = 2
EVALUATED_MAX_P = 7


class QWeylElem:
    __slots__ = ("p", "terms")

    def __init__(self, p, terms=None):
        self.p = p
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def x(cls, p):
        return cls(p, {(0, 1): CycInt.one(p)})

    @classmethod
    def y(cls, p):
        return cls(p, {(1, 0): CycInt.one(p)})

    @classmethod
    def scalar(cls, p, c):
        if isinstance(c, int):
            c = CycInt.from_int(p, c)
        return cls(p, {(0, 0): c})

    @classmethod
    def word(cls, p, w: str):
        out = cls.scalar(p, 1)
        for ch in w:
            if ch == "x":
                out = out * cls.x(p)
            elif ch == "y":
                out = out * cls.y(p)
            elif not ch.isspace():
                raise ValueError(f"letters must be x or y, got {ch!r}")
        return out

    def _coerce(self, other):
        if isinstance(other, QWeylElem):
            if other.p != self.p:
                raise ValueError("different p")
            return other
        return QWeylElem.scalar(self.p, other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t[k] + v if k in t else v
        return QWeylElem(self.p, t)

    __radd__ = __add__

    def __neg__(self):
        return QWeylElem(self.p, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, CycInt)):
            c = other if isinstance(other, CycInt) else CycInt.from_int(self.p, other)
            return QWeylElem(self.p, {k: v * c for k, v in self.terms.items()})
        return qweyl_mul(self, self._coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (int, CycInt)):
            return self * other
        return NotImplemented

    def __pow__(self, n):
        out = QWeylElem.scalar(self.p, 1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, CycInt)):
            other = QWeylElem.scalar(self.p, other)
        return isinstance(other, QWeylElem) and self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"QWeylElem({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j) in sorted(self.terms, key=lambda k: (-(k[0] + k[1]), -k[0])):
            c = self.terms[(i, j)]
            mono = ("y" + (f"^{i}" if i > 1 else "") if i else "") + \
                   ("x" + (f"^{j}" if j > 1 else "") if j else "")
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                if len(c.coeffs) and sum(1 for v in c.coeffs if v) > 1:
                    cs = f"({cs})"
                parts.append(f"{cs}·{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self):
        return [[i, j, c.to_json()] for (i, j), c in sorted(self.terms.items())]


@lru_cache(maxsize=None)
def _x_pow_y_pow(p, b, c):
    """x^b y^c in normal form, as a tuple of ((i, j), coeff)."""
    if b == 0 or c == 0:
        return (((c, b), CycInt.one(p)),)
    # x^b y^c = rho^b y x^b y^(c-1) + delta_b x^(b-1) y^(c-1)
    out = {}
    rb = CycInt.rho_power(p, b)
    for (i, j), v in _x_pow_y_pow(p, b, c - 1):
        out[(i + 1, j)] = out.get((i + 1, j), CycInt.zero(p)) + rb * v
    db = delta_s(p, b)
    if db:
        for (i, j), v in _x_pow_y_pow(p, b - 1, c - 1):
            out[(i, j)] = out.get((i, j), CycInt.zero(p)) + db * v
    return tuple((k, v) for k, v in out.items() if v)


def qweyl_mul(a: QWeylElem, b: QWeylElem) -> QWeylElem:
    p = a.p
    out = {}
    for (i1, j1), c1 in a.terms.items():
        for (i2, j2), c2 in b.terms.items():
            c12 = c1 * c2
            for (i, j), v in _x_pow_y_pow(p, j1, i2):
                key = (i1 + i, j + j2)
                out[key] = out[key] + c12 * v if key in out else c12 * v
    return QWeylElem(p, out)


def commutator(a, b):
    return a * b - b * a


def commutation_closed_form(p, i):
    """x^i y = rho^i y x^i + delta_i x^(i-1)."""
    out = QWeylElem(p, {(1, i): CycInt.rho_power(p, i)})
    if i:
        out = out + QWeylElem(p, {(0, i - 1): delta_s(p, i)})
    return out


# ---------------------------------------------------------------------------
# brute-force rewriting on words (an independent oracle)


def rewrite_words(p, word: str, order: str = "left"):
    """Reduce a word by repeatedly replacing one 'xy' with rho*'yx' + 1."""
    pending = {word: CycInt.one(p)}
    done = {}
    while pending:
        w, c = pending.popitem()
        pos = w.find("xy") if order == "left" else w.rfind("xy")
        if pos < 0:
            done[w] = done[w] + c if w in done else c
            continue
        for nw, nc in ((w[:pos] + "yx" + w[pos + 2:], c * CycInt.rho_power(p, 1)),
                       (w[:pos] + w[pos + 2:], c)):
            pending[nw] = pending[nw] + nc if nw in pending else nc
            if not pending[nw]:
                del pending[nw]
    terms = {}
    for w, c in done.items():
        if c:
            key = (w.count("y"), w.count("x"))
            terms[key] = terms[key] + c if key in terms else c
    return QWeylElem(p, terms)


def verify_center(p: int, samples: int = 20, seed: int = 0) -> dict:
    check_prime(p)
    x, y = QWeylElem.x(p), QWeylElem.y(p)
    s, t = x ** p, y ** p
    rng = random.Random(seed)
    rep = {
        "x^p commutes with x": not commutator(s, x),
        "x^p commutes with y": not commutator(s, y),
        "y^p commutes with x": not commutator(t, x),
        "y^p commutes with y": not commutator(t, y),
    }
    ok = True
    for _ in range(samples):
        w = random_elem(p, rng)
        ok &= not commutator(s, w) and not commutator(t, w)
    rep["random elements"] = ok
    rep["basis independent"] = basis_independence(p)
    return rep


def random_elem(p, rng, terms=4, deg=4, bound=3):
    out = {}
    for _ in range(terms):
        key = (rng.randrange(deg), rng.randrange(deg))
        out[key] = CycInt(p, [rng.randint(-bound, bound) for _ in range(p - 1)])
    return QWeylElem(p, out)


def basis_independence(p, bound=2):
    """Products s^a t^b y^i x^j (a, b <= bound, i, j < p) are distinct normal-form
    monomials with unit leading coefficient, so they are independent over Z[rho]."""
    x, y = QWeylElem.x(p), QWeylElem.y(p)
    s, t = x ** p, y ** p
    seen = set()
    for a in range(bound + 1):
        for b in range(bound + 1):
            cen = s ** a * t ** b
            for i in range(p):
                for j in range(p):
                    e = cen * (y ** i * x ** j)
                    lead = max(e.terms, key=lambda k: (k[0] + k[1], k[0]))
                    if lead != (b * p + i, a * p + j) or not e.terms[lead].is_unit():
                        return False
                    if lead in seen:
                        return False
                    seen.add(lead)
    return True


# ---------------------------------------------------------------------------
# the free C-module model


def basis(p):
    return [(i, j) for i in range(p) for j in range(p)]


@lru_cache(maxsize=None)
def structure_constants(p):
    """mult[(a, b)] = {d: poly in (s, t)} with e_a e_b = sum_d poly * e_d.

    Polynomials are dicts (deg_s, deg_t) -> CycInt.
    """
    B = basis(p)
    out = {}
    for a in B:
        ea = QWeylElem(p, {a: CycInt.one(p)})
        for b in B:
            prod = ea * QWeylElem(p, {b: CycInt.one(p)})
            entry = {}
            for (i, j), c in prod.terms.items():
                d = (i % p, j % p)
                mono = (j // p, i // p)
                poly = entry.setdefault(d, {})
                poly[mono] = poly[mono] + c if mono in poly else c
            out[(a, b)] = entry
    return out


def _poly_to_ctx(poly, C):
    s, t = C.var("s"), C.var("t")
    out = C.zero()
    for (a, b), c in poly.items():
        out = out + C.const(c) * s ** a * t ** b
    return out


def psi_matrix(p, ring: RingCtx, s_val, t_val):
    """Matrix of psi over ``ring`` with s, t specialized; rows/cols indexed by
    (c, d) and (a, b) for the basis e_a (x) e_b acting on e_c."""
    B = basis(p)
    idx = {e: k for k, e in enumerate(B)}
    n = len(B)
    sc = structure_constants(p)
    s_val, t_val = ring.coerce(s_val), ring.coerce(t_val)
    cache = {}

    def val(poly):
        key = tuple(sorted(poly.items()))
        if key not in cache:
            acc = ring.zero()
            for (a, b), c in poly.items():
                acc = acc + ring.const(c) * s_val ** a * t_val ** b
            cache[key] = acc
        return cache[key]

    L = {}
    Rm = {}
    for a in B:
        L[a] = [[ring.zero()] * n for _ in range(n)]
        Rm[a] = [[ring.zero()] * n for _ in range(n)]
    for (a, b), entry in sc.items():
        for d, poly in entry.items():
            v = val(poly)
            L[a][idx[d]][idx[b]] = v      # left mult by e_a on e_b
            Rm[b][idx[d]][idx[a]] = v     # right mult by e_b on e_a
    M = [[ring.zero()] * (n * n) for _ in range(n * n)]
    for ai, a in enumerate(B):
        for bi, b in enumerate(B):
            col = ai * n + bi
            # (L_a R_b)[d][c] = sum_k L_a[d][k] R_b[k][c]
            for c in range(n):
                for k in range(n):
                    r = Rm[b][k][c]
                    if not r:
                        continue
                    for d in range(n):
                        l = L[a][d][k]
                        if l:
                            M[c * n + d][col] = M[c * n + d][col] + l * r
    return M


def symbolic_psi_det(p: int):
    if p > SYMBOLIC_MAX_P:
        raise ValueError(f"symbolic determinant is capped at p = {SYMBOLIC_MAX_P}; use evaluated mode")
    C = polynomial_ring(p, ("s", "t"))
    M = psi_matrix(p, C, C.var("s"), C.var("t"))
    return C, M, bareiss_det(M, C)


def factor_power(f: RingElem, g: RingElem):
    """Largest k with g^k | f, and the cofactor."""
    k = 0
    while True:
        try:
            q = exact_quotient(f, g)
        except (DivisibilityError, RingError):
            return k, f
        f, k = q, k + 1


# ---------------------------------------------------------------------------
# evaluated mode: integers mod a prime q with rho -> a root of unity


def rho_image_mod(p, q):
    """A primitive p-th root of unity mod q (q = 1 mod p); -1 for p = 2."""
    if p == 2:
        return q - 1
    if (q - 1) % p:
        raise ValueError(f"q = {q} is not 1 mod {p}")
    for g in range(2, q):
        c = pow(g, (q - 1) // p, q)
        if c != 1:
            return c
    raise ValueError("no root of unity found")


def _cyc_mod(c: CycInt, q, rc):
    acc = 0
    pw = 1
    for v in c.coeffs:
        acc = (acc + v * pw) % q
        pw = pw * rc % q
    return acc


def _poly_mod(poly, q, rc, s0, t0):
    acc = 0
    for (a, b), c in poly.items():
        acc = (acc + _cyc_mod(c, q, rc) * pow(s0, a, q) * pow(t0, b, q)) % q
    return acc


def psi_matrix_mod(p, q, rc, s0, t0):
    B = basis(p)
    idx = {e: k for k, e in enumerate(B)}
    n = len(B)
    sc = structure_constants(p)
    L = np.zeros((n, n, n), dtype=np.int64)
    R = np.zeros((n, n, n), dtype=np.int64)
    for (a, b), entry in sc.items():
        for d, poly in entry.items():
            v = _poly_mod(poly, q, rc, s0, t0)
            L[idx[a], idx[d], idx[b]] = v
            R[idx[b], idx[d], idx[a]] = v
    M = np.zeros((n * n, n * n), dtype=np.int64)
    for ai in range(n):
        for bi in range(n):
            prod = (L[ai] @ R[bi]) % q          # [d, c]
            M[:, ai * n + bi] = prod.T.reshape(-1)
    return M


def rank_mod(M, q):
    A = np.array(M, dtype=np.int64) % q
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, q) % q
        nz = np.nonzero(A[:, c])[0]
        for i in nz:
            if i != r:
                A[i] = (A[i] - A[i, c] * A[r]) % q
        r += 1
        if r == rows:
            break
    return r


def det_mod(M, q):
    A = np.array(M, dtype=np.int64) % q
    n = A.shape[0]
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i, c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[[c, piv]] = A[[piv, c]]
            det = -det
        det = det * int(A[c, c]) % q
        inv = pow(int(A[c, c]), -1, q)
        for i in range(c + 1, n):
            if A[i, c]:
                A[i] = (A[i] - A[i, c] * inv % q * A[c]) % q
    return det % q


def default_q(p):
    """Smallest prime q = 1 mod p, except 7 for p = 2 so small sweeps stay comparable."""
    if p == 2:
        return 7
    return next(q for q in range(p + 1, 10 ** 4) if is_prime(q) and q % p == 1)


def eta_p_mod(p, q, rc):
    return pow((rc - 1) % q, p, q)


@dataclass
class AzumayaCert:
    p: int
    mode: str
    det: str | None = None
    exponent: int | None = None
    unit: str | None = None
    points: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    def to_json(self):
        return {"p": self.p, "mode": self.mode, "det": self.det, "exponent": self.exponent,
                "unit": self.unit, "points": self.points, "checks": self.checks}


def azumaya_det(p: int, mode: str = "evaluated", points=None, q=None) -> AzumayaCert:
    check_prime(p)
    if mode in ("symbolic", "sym"):
        return _azumaya_symbolic(p)
    if mode not in ("evaluated", "eval"):
        raise ValueError("mode must be symbolic or evaluated")
    if p > EVALUATED_MAX_P:
        raise ValueError(f"evaluated mode is capped at p = {EVALUATED_MAX_P}")
    q = q or default_q(p)
    rc = rho_image_mod(p, q)
    if points is None:
        points = [(a, b) for a in range(q) for b in range(q)]
    ep = eta_p_mod(p, q, rc)
    sign = (-1) ** (p - 1)
    rows = []
    for s0, t0 in points:
        M = psi_matrix_mod(p, q, rc, s0 % q, t0 % q)
        unit = rank_mod(M, q) == M.shape[0]
        pred = (1 + s0 * t0 * ep) % q != 0
        alt = (1 + sign * s0 * t0 * ep) % q != 0
        rows.append({"s": s0 % q, "t": t0 % q, "psi_invertible": unit,
                     "unit_1_plus_st_eta_p": pred, "matches": unit == pred,
                     "matches_signed_locus": unit == alt})
    cert = AzumayaCert(p, "evaluated", points=rows)
    cert.checks = {
        "q": q, "rho_image": rc,
        "locus_matches": all(r["matches"] for r in rows),
        "signed_locus_matches": all(r["matches_signed_locus"] for r in rows),
        "mismatches": sum(not r["matches"] for r in rows),
    }
    return cert


def _azumaya_symbolic(p):
    C, M, f = symbolic_psi_det(p)
    s, t = C.var("s"), C.var("t")
    eta_p = C.eta() ** p
    literal = 1 + s * t * eta_p
    signed = 1 + (-1) ** (p - 1) * s * t * eta_p
    k_literal, rest_literal = factor_power(f, literal)
    k_signed, rest_signed = factor_power(f, signed)
    cert = AzumayaCert(p, "symbolic", det=str(f))
    unit_literal = rest_literal.is_constant() and rest_literal.constant().is_unit()
    unit_signed = rest_signed.is_constant() and rest_signed.constant().is_unit()
    cert.exponent = k_literal if unit_literal else k_signed
    cert.unit = str(rest_literal if unit_literal else rest_signed)
    # f modulo p is a non-zero constant: (f, p) = C
    mod_p = {m: c for m, c in f.terms.items()
             if any(v % p for v in c.coeffs)}
    cert.checks = {
        "det_is_unit_times_power_of_1_plus_st_eta_p": unit_literal and k_literal >= 1,
        "det_is_unit_times_power_of_signed_form": unit_signed and k_signed >= 1,
        "exponent_1_plus_st_eta_p": k_literal,
        "exponent_signed_form": k_signed,
        "signed_form": str(signed),
        "f_mod_p_is_unit_constant": set(mod_p) <= {(0, 0)} and bool(mod_p),
    }
    return cert


# ---------------------------------------------------------------------------
# nilpotence on the degenerate locus


def algebra_mod(p, q, rc, s0, t0):
    """Left-multiplication tensor of B tensor F_q at (s0, t0): L[a][d][b]."""
    B = basis(p)
    idx = {e: k for k, e in enumerate(B)}
    n = len(B)
    L = np.zeros((n, n, n), dtype=np.int64)
    for (a, b), entry in structure_constants(p).items():
        for d, poly in entry.items():
            L[idx[a], idx[d], idx[b]] = _poly_mod(poly, q, rc, s0, t0)
    return L


def _mul_vec(L, u, v, q):
    # (sum u_a e_a)(sum v_b e_b)
    return np.einsum("a,adb,b->d", u, L, v) % q


def _span_basis(vecs, q):
    if not vecs:
        return []
    A = np.array(vecs, dtype=np.int64) % q
    out = []
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, q) % q
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % q
        r += 1
    return [A[i] for i in range(r)]


def nilpotence_witness(p, q, s0, t0, element=None):
    """Two-sided ideal J generated by 1 + eta*xy in B tensor F_q at (s0, t0).

    Returns (dim J, least k with J^k = 0, or None if J is not nilpotent)."""
    rc = rho_image_mod(p, q)
    L = algebra_mod(p, q, rc, s0, t0)
    B = basis(p)
    idx = {e: k for k, e in enumerate(B)}
    n = len(B)
    if element is None:
        z = np.zeros(n, dtype=np.int64)
        z[idx[(0, 0)]] = 1
        xy = QWeylElem.x(p) * QWeylElem.y(p)
        for (i, j), c in xy.terms.items():
            z[idx[(i, j)]] = (z[idx[(i, j)]] + (rc - 1) * _cyc_mod(c, q, rc)) % q
    else:
        z = np.array(element, dtype=np.int64) % q
    unit = np.eye(n, dtype=np.int64)
    J = _span_basis([_mul_vec(L, _mul_vec(L, unit[a], z, q), unit[b], q)
                     for a in range(n) for b in range(n)], q)
    dim = len(J)
    power = J
    for k in range(1, n + 2):
        if not power:
            return dim, k
        power = _span_basis([_mul_vec(L, u, v, q) for u in power for v in J], q)
    return dim, None


# ---------------------------------------------------------------------------
# cyclic algebras and differential crossed products


@dataclass
class CyclicAlgebra:
    """Elements sum_j s_j beta^j over a theta-extension S, beta s = sigma(s) beta, beta^p = b."""
    ext: GaloisExt
    b: RingElem

    @property
    def p(self):
        return self.ext.p

    def elem(self, coeffs):
        S = self.ext.ext
        out = [S.zero()] * self.p
        for j, c in enumerate(coeffs):
            out[j] = S.coerce(c)
        return tuple(out)

    def mul(self, u, v):
        p = self.p
        S = self.ext.ext
        b = S.coerce(self.b)
        out = [S.zero()] * p
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                term = ui * self.ext.sigma_power(vj, i)
                k = i + j
                if k >= p:
                    term = term * b
                    k -= p
                out[k] = out[k] + term
        return tuple(out)

    def one(self):
        return self.elem([1])

    def beta(self):
        return self.elem([0, 1])

    def alpha(self):
        return self.elem([self.ext.theta])

    def power(self, u, n):
        out = self.one()
        for _ in range(n):
            out = self.mul(out, u)
        return out

    def sub(self, u, v):
        return tuple(a - c for a, c in zip(u, v))

    def scale(self, c, u):
        S = self.ext.ext
        return tuple(S.coerce(c) * a for a in u)


def specialize_cyclic(p, u, b, ctx: RingCtx):
    """x -> beta, y -> gamma = alpha beta^-1 in the cyclic algebra (L/K, sigma, b)."""
    u, b = ctx.coerce(u), ctx.coerce(b)
    binv = ctx.try_invert(b)
    if binv is None:
        raise RingError("b must be a unit")
    ext = build_extension(ctx, u)
    A = CyclicAlgebra(ext, b)
    beta = A.beta()
    # beta^-1 = beta^(p-1) / b
    beta_inv = A.scale(binv, A.power(beta, p - 1))
    gamma = A.mul(A.alpha(), beta_inv)
    S = ext.ext
    rho = S.rho()

    def image(e: QWeylElem):
        out = A.elem([])
        for (i, j), c in e.terms.items():
            term = A.mul(A.power(gamma, i), A.power(beta, j))
            out = tuple(o + S.const(c) * t for o, t in zip(out, term))
        return out

    one = A.one()
    rel = A.sub(A.sub(A.mul(beta, gamma), A.scale(rho, A.mul(gamma, beta))), one)
    sign = (-1) ** (p - 1)
    checks = {
        "relation": all(not v for v in rel),
        "x^p -> b": A.power(beta, p) == A.scale(b, one),
        "y^p -> u/b": A.power(gamma, p) == A.scale(u * binv, one),
        "y^p -> (-1)^(p-1) u/b": A.power(gamma, p) == A.scale(sign * u * binv, one),
        "beta alpha beta^-1 = rho alpha + 1":
            A.mul(A.mul(beta, A.alpha()), beta_inv) == tuple(
                rho * a + c for a, c in zip(A.alpha(), one)),
    }
    return A, image, checks


def matrix_is_invertible(M, ring: RingCtx) -> bool:
    """Invertibility of a square matrix over a finite commutative ring."""
    n = len(M)
    if ring.is_finite and not ring.vars and _is_prime_field(ring):
        q = ring.base.order
        A = [[int(e.constant().coeffs[0]) % q if e.terms else 0 for e in row] for row in M]
        return rank_mod(A, q) == n
    A = [list(row) for row in M]
    for c in range(n):
        piv = None
        for i in range(c, n):
            inv = ring.try_invert(A[i][c]) if A[i][c] else None
            if inv is not None:
                piv = i
                break
        if piv is None:
            return _z_module_invertible(M, ring)
        A[c], A[piv] = A[piv], A[c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return True


def _is_prime_field(ring):
    return ring.base.order is not None and is_prime(ring.base.order)


def _z_module_invertible(M, ring):
    from .galois import z_module_gens
    n = len(M)
    gens = z_module_gens(ring)
    cols = []
    for j in range(n):
        for g in gens:
            col = []
            for i in range(n):
                col.extend(ring.zvec(M[i][j] * g))
            cols.append(col)
    lat = []
    for i in range(n):
        for r in ring.lattice():
            row = [0] * (len(r) * n)
            row[i * len(r):(i + 1) * len(r)] = r
            lat.append(row)
    return lattice_index(cols + lat, len(cols[0]), ring.base.modulus) == 1


def diff_crossed_product_check(ring: RingCtx, c, b) -> dict:
    """[c, b]: gamma^p = c, beta^p = b, beta gamma - gamma beta = 1 over a ring with p = 0.

    It is B tensor ring with rho -> 1, s -> b, t -> c."""
    p = ring.p
    if ring.coerce(p) or ring.base.reduce(CycInt.rho_power(p, 1)) != ring.base.reduce(
            CycInt.one(p)):
        raise RingError("differential crossed products need p = 0 and rho = 1")
    M = psi_matrix(p, ring, b, c)
    return {"c": str(ring.coerce(c)), "b": str(ring.coerce(b)),
            "azumaya": matrix_is_invertible(M, ring)}


def quotient_ctx(R: RingCtx, ideal_gens) -> tuple:
    """R/I for I generated by constants and bare variables; returns (R/I, R -> R/I)."""
    consts, killed = [], []
    for g in ideal_gens:
        g = R.coerce(g)
        if g.is_constant():
            consts.append(g.constant())
        elif len(g.terms) == 1 and sum(next(iter(g.terms))) == 1 and g == R.var(
                R.vars[next(iter(g.terms)).index(1)]):
            killed.append(next(iter(g.terms)).index(1))
        else:
            raise NotImplementedError("ideal generators must be constants or variables")
    if R.loc is not None:
        raise NotImplementedError("localized rings are not supported")
    base = BaseRing(R.p, list(R.base.gens) + consts)
    Q0 = R.with_base(base)
    rules = dict(Q0.rules)
    for i in killed:
        rules[i] = (1, {})
    Q = RingCtx(base, R.vars, rules)
    return Q, RingHom(R, Q, Q.gens())


def brauer_lift_demo(R: RingCtx, ideal_gens, c, b) -> dict:
    """Certify B tensor R (s -> b, t -> c) is Azumaya and reduces to [c mod I, b mod I].

    ``c`` and ``b`` are the chosen lifts, given in R."""
    p = R.p
    Q, h = quotient_ctx(R, ideal_gens)
    checks = {"p_in_I": not Q.coerce(p), "eta_in_I": not Q.eta()}
    if R.is_finite and R.order() <= 10 ** 4:
        checks["1+pR_units"] = all(R.is_unit(1 + p * x) for x in R.elements())
    c1, b1 = R.coerce(c), R.coerce(b)
    c2, b2 = h(c1), h(b1)
    M1 = psi_matrix(p, R, b1, c1)
    M2 = psi_matrix(p, Q, b2, c2)
    checks["structure_reduces"] = all(h(x) == y for r1, r2 in zip(M1, M2) for x, y in zip(r1, r2))
    checks["lift_azumaya"] = matrix_is_invertible(M1, R)
    checks["reduction_azumaya"] = diff_crossed_product_check(Q, c2, b2)["azumaya"]
    checks["c"], checks["b"] = str(c1), str(b1)
    checks["c_reduced"], checks["b_reduced"] = str(c2), str(b2)
    checks["ok"] = all(v for v in checks.values() if isinstance(v, bool))
    return checks
