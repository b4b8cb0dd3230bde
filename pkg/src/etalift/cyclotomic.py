"""Exact arithmetic in Z[rho] = Z[X]/(X^(p-1) + ... + X + 1).

Elements are stored in the basis 1, rho, ..., rho^(p-2) with Python integers.
The module also provides the distinguished constants built from
eta = rho - 1 (the b_i, y and the unit x with p = x * eta^(p-1)), the
geometric sums delta_s, and the automorphisms rho -> rho^s.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, gcd

from . import intlin

MAX_P = 13


class ConsistencyError(AssertionError):
    """An identity that must hold exactly failed: an arithmetic bug."""


class DivisibilityError(ArithmeticError):
    """Exact division was requested for a non-divisible element."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int, bound: int = MAX_P) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"p must be prime, got {p!r}")
    if p > bound:
        raise ValueError(f"p={p} exceeds the configured bound {bound}")
    return p


def _reduce_full(p, full):
    """Fold a coefficient list of any length into the basis of Z[rho]."""
    v = [0] * p
    for k, c in enumerate(full):
        if c:
            v[k % p] += c
    top = v[p - 1]
    return tuple(c - top for c in v[: p - 1])


class CycInt:
    """Element of Z[rho] for a fixed prime p.  Immutable."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs=()):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != p - 1:
            coeffs = _reduce_full(p, coeffs)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CycInt is immutable")

    # constructors
    @classmethod
    def from_int(cls, p, n):
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def rho_power(cls, p, k):
        v = [0] * p
        v[k % p] = 1
        return cls(p, _reduce_full(p, v))

    @classmethod
    def zero(cls, p):
        return cls(p, (0,) * (p - 1))

    @classmethod
    def one(cls, p):
        return cls.from_int(p, 1)

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise TypeError(f"mismatched primes {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.p, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, tuple(a * other for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        full = [0] * (2 * p - 3 if p > 2 else 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        full[i + j] += a * b
        return CycInt(p, _reduce_full(p, full))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycInt.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = CycInt.from_int(self.p, other)
        if not isinstance(other, CycInt):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_integer(self):
        return not any(self.coeffs[1:])

    def __repr__(self):
        return f"CycInt({self.p}, {list(self.coeffs)})"

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("ρ" if k == 1 else f"ρ^{k}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}·{mono}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    # Galois structure
    def tau(self, s: int) -> "CycInt":
        """Image under the automorphism rho -> rho^s (s prime to p)."""
        p = self.p
        v = [0] * p
        for k, c in enumerate(self.coeffs):
            v[(k * s) % p] += c
        return CycInt(p, _reduce_full(p, v))

    def value_at_one(self) -> int:
        return sum(self.coeffs)

    def norm(self) -> int:
        return int(_norm_data(self)[1])

    def exact_div(self, other: "CycInt") -> "CycInt":
        """self / other in Z[rho]; raises DivisibilityError if not exact."""
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero in Z[rho]")
        adj, nrm = _norm_data(other)
        num = self * adj
        if any(c % nrm for c in num.coeffs):
            raise DivisibilityError(f"{self} is not divisible by {other} in Z[rho]")
        return CycInt(self.p, tuple(c // nrm for c in num.coeffs))

    def divides(self, other: "CycInt") -> bool:
        try:
            other.exact_div(self)
        except DivisibilityError:
            return False
        return True

    def is_unit(self) -> bool:
        return bool(self) and abs(self.norm()) == 1

    def inverse(self) -> "CycInt":
        return CycInt.one(self.p).exact_div(self)

    # serialization
    def to_json(self):
        return {"p": self.p, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        p = int(data["p"])
        coeffs = [int(c) for c in data["coeffs"]]
        if len(coeffs) != p - 1:
            raise ValueError(f"expected {p - 1} coefficients, got {len(coeffs)}")
        return cls(p, coeffs)


@lru_cache(maxsize=4096)
def _norm_data_cached(p, coeffs):
    a = CycInt(p, coeffs)
    adj = CycInt.one(p)
    for k in range(2, p):
        adj = adj * a.tau(k)
    n = a * adj
    if not n.is_integer():
        raise ConsistencyError("norm is not rational")
    return adj, n.coeffs[0]


def _norm_data(a):
    return _norm_data_cached(a.p, a.coeffs)


def rho(p):
    return CycInt.rho_power(p, 1)


def eta(p):
    return rho(p) - 1


def delta_s(p: int, s: int) -> CycInt:
    """1 + rho + ... + rho^(s-1); depends only on s mod p."""
    if s < 0:
        raise ValueError("s must be non-negative")
    v = [0] * p
    for k in range(s % p):
        v[k] = 1
    return CycInt(p, _reduce_full(p, v))


def is_primitive_root(s: int, p: int) -> bool:
    if s % p == 0:
        return False
    return len({pow(s, k, p) for k in range(1, p)}) == p - 1


def tau_on_cyc(a: CycInt, s: int) -> CycInt:
    if not is_primitive_root(s, a.p):
        raise ValueError(f"{s} does not generate (Z/{a.p}Z)^*")
    return a.tau(s)


@dataclass(frozen=True)
class EtaData:
    p: int
    eta: CycInt
    b: tuple
    y: CycInt
    x_unit: CycInt

    def to_json(self):
        return {
            "p": self.p,
            "eta": self.eta.to_json(),
            "b": [str(v) for v in self.b],
            "y": self.y.to_json(),
            "x_unit": self.x_unit.to_json(),
            "x_times_y": (self.x_unit * self.y).to_json(),
        }


@lru_cache(maxsize=None)
def compute_eta_data(p: int) -> EtaData:
    check_prime(p)
    e = eta(p)
    b = tuple(comb(p, i) // p for i in range(1, p))
    if any(comb(p, i) % p for i in range(1, p)) or b[0] != 1:
        raise ConsistencyError("binomial coefficients not divisible by p")
    y = CycInt.zero(p)
    for i, bi in enumerate(b, start=1):
        y = y + e ** (i - 1) * bi
    x = -(y.inverse())
    ep1 = e ** (p - 1)
    if ep1 != -(y * p):
        raise ConsistencyError("eta^(p-1) != -p*y")
    if x * ep1 != CycInt.from_int(p, p):
        raise ConsistencyError("x*eta^(p-1) != p")
    if x * y != CycInt.from_int(p, -1):
        raise ConsistencyError("x*y != -1")
    if reduce_mod(x + 1, 0, 1) != 0:
        raise ConsistencyError("x is not congruent to -1 mod eta")
    return EtaData(p, e, b, y, x)


# ---------------------------------------------------------------------------
# quotients Z[rho]/I


class BaseRing:
    """Z[rho]/I for an ideal I given by generators (integers or CycInts).

    I = 0 gives Z[rho] itself.  Representatives are canonical: reduced
    modulo the Hermite normal form of I viewed as a lattice in Z^(p-1).
    """

    def __init__(self, p: int, gens=()):
        self.p = check_prime(p)
        gens = [CycInt.from_int(p, g) if isinstance(g, int) else g for g in gens]
        gens = [g for g in gens if g]
        self.gens = tuple(gens)
        n = p - 1
        if not gens:
            self.hnf = None
            self.order = None
            self.modulus = 0
            return
        D = 0
        for g in gens:
            D = gcd(D, g.norm())
        D = abs(D)
        vecs = []
        for g in gens:
            for k in range(n):
                vecs.append(list((g * CycInt.rho_power(p, k)).coeffs))
        # HNF on reversed coordinates so representatives live in low powers of rho
        self._hnf_rev = intlin.hnf([v[::-1] for v in vecs], n, D)
        self.hnf = [r[::-1] for r in self._hnf_rev]
        self.order = intlin.hnf_det(self._hnf_rev)
        # exponent of the additive group: smallest m with m*Z^n inside I
        m = self.order
        for d in sorted(_divisors(self.order)):
            if all(not any(intlin.reduce_vec([d if k == j else 0 for k in range(n)], self._hnf_rev))
                   for j in range(n)):
                m = d
                break
        self.modulus = m

    @property
    def is_finite(self):
        return self.hnf is not None

    @property
    def is_exact(self):
        return self.hnf is None

    def key(self):
        return (self.p, None if self.hnf is None else tuple(map(tuple, self.hnf)))

    def __eq__(self, other):
        return isinstance(other, BaseRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def reduce(self, a: CycInt) -> CycInt:
        if self.hnf is None:
            return a
        return CycInt(self.p, intlin.reduce_vec(a.coeffs[::-1], self._hnf_rev)[::-1])

    def contains(self, big: "BaseRing") -> bool:
        """True if the ideal of ``big`` is contained in this ring's ideal."""
        if self.hnf is None:
            return big.hnf is None
        return all(not self.reduce(g) for g in big.gens)

    def try_invert(self, a: CycInt):
        a = self.reduce(a)
        if self.hnf is None:
            return a.inverse() if a.is_unit() else None
        p = self.p
        cols = [list((a * CycInt.rho_power(p, k)).coeffs) for k in range(p - 1)]
        target = [1] + [0] * (p - 2)
        x = intlin.solve_mod_lattice(cols, target, self.hnf, self.modulus)
        if x is None:
            return None
        inv = self.reduce(CycInt(p, x))
        if self.reduce(inv * a) != self.reduce(CycInt.one(p)):
            raise ConsistencyError("base inverse check failed")
        return inv

    def elements(self):
        """Enumerate canonical representatives (finite rings only)."""
        if self.hnf is None:
            raise ValueError("Z[rho] is infinite")
        from itertools import product
        ranges = [range(self._hnf_rev[j][j]) for j in range(self.p - 1)]
        return [CycInt(self.p, v[::-1]) for v in product(*ranges)]

    def describe(self):
        if self.hnf is None:
            return f"Z[rho], p={self.p}"
        return f"Z[rho]/({', '.join(str(g) for g in self.gens)}), p={self.p}, order {self.order}"

    def to_json(self):
        return {"p": self.p, "ideal": [g.to_json() for g in self.gens]}


def _divisors(n):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return set(out)


def quotient(p: int, m: int | None = None, eta_power: int | None = None, extra=()) -> BaseRing:
    """Z[rho]/(m, eta^k, extra...)."""
    gens = []
    if m:
        gens.append(m)
    if eta_power is not None and eta_power >= 0:
        gens.append(eta(p) ** eta_power)
    gens.extend(extra)
    return BaseRing(p, gens)


def reduce_mod(a: CycInt, m: int, eta_power: int):
    """Image of ``a`` in Z[rho]/(m, eta^eta_power).

    The residue field Z[rho]/(eta) = F_p is returned as an int in [0, p).
    """
    if not m and (eta_power is None or eta_power <= 0):
        if eta_power == 0:
            return 0
        raise ValueError("zero modulus with no eta power")
    ring = quotient(a.p, m, eta_power if eta_power else None)
    if ring.contains(quotient(a.p, None, 1)):
        # the ideal contains eta, so the quotient is F_p (or zero when it is everything)
        return a.value_at_one() % a.p if ring.order == a.p else 0
    return ring.reduce(a)


def primitive_root_choice(p: int):
    """Smallest s generating (Z/pZ)^* with (s^(p-1) - 1)/p prime to p.

    Returns (s, r).  For p = 2 the group is trivial and (1, 0) is returned.
    """
    check_prime(p)
    if p == 2:
        return 1, 0
    for s in range(2, 2 + 64 * p * p):
        if not is_primitive_root(s, p):
            continue
        r, rem = divmod(s ** (p - 1) - 1, p)
        if rem:
            raise ConsistencyError("Fermat's little theorem failed")
        if r % p:
            return s, r
    raise ConsistencyError(f"no admissible primitive root found for p={p}")
