"""Integer lattice helpers: Hermite normal form and linear systems over Z/D.

Every finite ring in this package is a quotient Z^n / L of a free Z-module,
with D * Z^n contained in L for some positive integer D.  The routines here
work with that description directly.
"""

from __future__ import annotations

from math import gcd


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _echelon(gens, n, modulus, track=0):
    """Row-echelonize ``gens`` (pairs of vector, tracker) modulo ``modulus``.

    Returns a dict column -> (pivot_vector, tracker).  Pivots are positive
    and divide ``modulus``.  ``track`` is the tracker length (0 disables).
    """
    D = modulus
    pool = [([v % D for v in vec], list(tr)) for vec, tr in gens]
    pool += [([D if k == j else 0 for k in range(n)], [0] * track) for j in range(n)]
    pivots = {}
    for j in range(n):
        active = [g for g in pool if g[0][j] % D]
        rest = [g for g in pool if not g[0][j] % D]
        if not active:
            pool = rest
            continue
        piv_vec, piv_tr = active[0]
        for vec, tr in active[1:]:
            a, b = piv_vec[j], vec[j]
            g, x, y = _xgcd(a, b)
            ua, ub = a // g, b // g
            new_piv = [(x * pv + y * w) % D for pv, w in zip(piv_vec, vec)]
            new_other = [(ua * w - ub * pv) % D for pv, w in zip(piv_vec, vec)]
            new_ptr = [(x * pt + y * t) % D for pt, t in zip(piv_tr, tr)]
            new_otr = [(ua * t - ub * pt) % D for pt, t in zip(piv_tr, tr)]
            piv_vec, piv_tr = new_piv, new_ptr
            rest.append((new_other, new_otr))
        # normalize pivot to gcd(pivot, D)
        g, x, _ = _xgcd(piv_vec[j], D)
        # (D/g) * pivot vanishes in column j but not necessarily elsewhere
        rest.append(([(D // g) * v % D for v in piv_vec], [(D // g) * t % D for t in piv_tr]))
        piv_vec = [x * v % D for v in piv_vec]
        piv_tr = [x * t % D for t in piv_tr]
        piv_vec[j] = g
        pivots[j] = (piv_vec, piv_tr)
        pool = rest
    return pivots


def hnf(gens, n, modulus):
    """Hermite normal form of the lattice spanned by ``gens`` and modulus*Z^n.

    Returns upper-triangular rows, one per column, with positive pivots and
    entries above each pivot reduced into [0, pivot).
    """
    piv = _echelon([(g, []) for g in gens], n, modulus)
    rows = [list(piv[j][0]) if j in piv else [modulus if k == j else 0 for k in range(n)]
            for j in range(n)]
    for j in range(n):
        d = rows[j][j]
        for i in range(j):
            q = rows[i][j] // d
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[j])]
    return rows


def hnf_det(rows):
    out = 1
    for j, r in enumerate(rows):
        out *= r[j]
    return out


def reduce_vec(vec, rows):
    """Canonical representative of ``vec`` modulo the full-rank HNF ``rows``."""
    v = list(vec)
    for j, r in enumerate(rows):
        q = v[j] // r[j]
        if q:
            v = [a - q * b for a, b in zip(v, r)]
    return v


def lattice_index(gens, n, modulus):
    """Index [Z^n : span(gens) + modulus*Z^n]."""
    piv = _echelon([(g, []) for g in gens], n, modulus)
    out = 1
    for j in range(n):
        out *= piv[j][0][j] if j in piv else modulus
    return out


def solve_mod_lattice(cols, b, lattice, modulus):
    """Find integers x with sum x_i cols[i] == b modulo span(lattice) + modulus*Z^n.

    Returns the list x (entries reduced mod ``modulus``) or None.
    """
    n = len(b)
    k = len(cols)
    gens = [(c, [1 if i == t else 0 for i in range(k)]) for t, c in enumerate(cols)]
    gens += [(r, [0] * k) for r in lattice]
    piv = _echelon(gens, n, modulus, track=k)
    D = modulus
    rhs = [v % D for v in b]
    x = [0] * k
    for j in range(n):
        if not rhs[j] % D:
            continue
        if j not in piv:
            return None
        vec, tr = piv[j]
        if rhs[j] % vec[j]:
            return None
        q = rhs[j] // vec[j]
        rhs = [(a - q * w) % D for a, w in zip(rhs, vec)]
        x = [(a + q * t) % D for a, t in zip(x, tr)]
    return x


def lcm(a, b):
    return a * b // gcd(a, b)


def kernel_mod_lattice(cols, lattice, modulus):
    """Generators (mod ``modulus``) of {x : sum x_i cols[i] in span(lattice) + modulus*Z^n}."""
    k = len(cols)
    n = len(cols[0]) if cols else 0
    gens = [list(c) + [1 if i == t else 0 for i in range(k)] for t, c in enumerate(cols)]
    gens += [list(r) + [0] * k for r in lattice]
    rows = hnf(gens, n + k, modulus)
    return [r[n:] for r in rows[n:] if any(v % modulus for v in r[n:])]
