"""Univariate polynomials over a field and the rational canonical form.

Polynomials are coefficient tuples, constant term first, with no trailing
zeros (the zero polynomial is ``()``). Conjugacy classes are decided through
the invariant factors of xI - A, computed by a Smith normal form over F[x].
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from .errors import DimensionMismatch
from .field import Field
from .linalg import Matrix, block_diagonal, is_square

Poly = tuple


def p_strip(F: Field, a) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def p_deg(a: Poly) -> int:
    return len(a) - 1


def p_add(F: Field, a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return p_strip(F, [F.add(a[i] if i < len(a) else F.zero, b[i] if i < len(b) else F.zero) for i in range(n)])


def p_neg(F: Field, a: Poly) -> Poly:
    return tuple(F.neg(x) for x in a)


def p_sub(F: Field, a: Poly, b: Poly) -> Poly:
    return p_add(F, a, p_neg(F, b))


def p_mul(F: Field, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return p_strip(F, out)


def p_divmod(F: Field, a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q = [F.zero] * max(len(a) - len(b) + 1, 0)
    inv = F.inv(b[-1])
    while len(r) >= len(b) and r:
        c = F.mul(r[-1], inv)
        k = len(r) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            r[k + i] = F.sub(r[k + i], F.mul(c, y))
        r = list(p_strip(F, r))
    return p_strip(F, q), tuple(r)


def p_monic(F: Field, a: Poly) -> Poly:
    if not a:
        return a
    inv = F.inv(a[-1])
    return tuple(F.mul(x, inv) for x in a)


def p_eval(F: Field, a: Poly, x):
    out = F.zero
    for c in reversed(a):
        out = F.add(F.mul(out, x), c)
    return out


def invariant_factors(F: Field, A: Matrix) -> tuple[Poly, ...]:
    """Monic invariant factors of degree >= 1, each dividing the next."""
    if not is_square(A):
        raise DimensionMismatch("invariant factors need a square matrix")
    n = len(A)
    M = [
        [p_strip(F, [F.neg(A[i][j]), F.one if i == j else F.zero]) for j in range(n)]
        for i in range(n)
    ]
    for k in range(n):
        while True:
            best = None
            for i in range(k, n):
                for j in range(k, n):
                    if M[i][j] and (best is None or len(M[i][j]) < len(M[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i0, j0 = best
            M[k], M[i0] = M[i0], M[k]
            for row in M:
                row[k], row[j0] = row[j0], row[k]
            piv = M[k][k]
            clean = True
            for i in range(k + 1, n):
                if M[i][k]:
                    q, r = p_divmod(F, M[i][k], piv)
                    M[i] = [p_sub(F, M[i][j], p_mul(F, q, M[k][j])) for j in range(n)]
                    clean = clean and not r
            for j in range(k + 1, n):
                if M[k][j]:
                    q, r = p_divmod(F, M[k][j], piv)
                    for i in range(n):
                        M[i][j] = p_sub(F, M[i][j], p_mul(F, q, M[i][k]))
                    clean = clean and not r
            if not clean:
                continue
            bad = next(
                (i for i in range(k + 1, n) for j in range(k + 1, n) if p_divmod(F, M[i][j], piv)[1]),
                None,
            )
            if bad is None:
                break
            M[k] = [p_add(F, x, y) for x, y in zip(M[k], M[bad])]
    diag = [p_monic(F, M[i][i]) for i in range(n)]
    return tuple(sorted((d for d in diag if len(d) > 1), key=len))


def companion(F: Field, f: Poly) -> Matrix:
    m = p_deg(f)
    rows = [[F.zero] * m for _ in range(m)]
    for i in range(1, m):
        rows[i][i - 1] = F.one
    for i in range(m):
        rows[i][m - 1] = F.neg(f[i])
    return tuple(tuple(r) for r in rows)


def rational_canonical_form(F: Field, A: Matrix) -> Matrix:
    """Frobenius normal form: block diagonal of companion matrices of the invariant factors."""
    facs = invariant_factors(F, A)
    if not facs:
        return ()
    return block_diagonal(F, [companion(F, f) for f in facs])


def are_conjugate(F: Field, A: Matrix, B: Matrix) -> bool:
    if len(A) != len(B):
        return False
    return rational_canonical_form(F, A) == rational_canonical_form(F, B)


def char_poly(F: Field, A: Matrix) -> Poly:
    out: Poly = (F.one,)
    for f in invariant_factors(F, A):
        out = p_mul(F, out, f)
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def roots_in_field(F: Field, f: Poly) -> list:
    """Distinct roots of f lying in the field itself (rational root test over Q)."""
    if len(f) <= 1:
        return []
    if F.characteristic:
        return [x for x in F.elements() if p_eval(F, f, x) == 0]
    roots = []
    coeffs = [Fraction(c) for c in f]
    if coeffs[0] == 0:
        roots.append(Fraction(0))
        k = next(i for i, c in enumerate(coeffs) if c != 0)
        coeffs = coeffs[k:]
    if len(coeffs) <= 1:
        return roots
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    for p_ in _divisors(ints[0]):
        for q_ in _divisors(ints[-1]):
            for s in (1, -1):
                x = Fraction(s * p_, q_)
                if x not in roots and p_eval(F, tuple(coeffs), x) == 0:
                    roots.append(x)
    return sorted(roots)
