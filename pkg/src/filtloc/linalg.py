"""Exact dense linear algebra over a ``Field``.

Matrices are tuples of row tuples. Vectors are tuples and are treated as
columns when a matrix acts on them. Every function takes the field first.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DimensionMismatch, SingularMatrix
from .field import Field

Matrix = tuple
Vector = tuple


def matrix(F: Field, rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(F(x) for x in row) for row in rows)


def identity(F: Field, n: int) -> Matrix:
    one, zero = F.one, F.zero
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def zeros(F: Field, r: int, c: int) -> Matrix:
    return tuple((F.zero,) * c for _ in range(r))


def diagonal(F: Field, entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(tuple(F(entries[i]) if i == j else F.zero for j in range(n)) for i in range(n))


def shape(M: Matrix) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def is_square(M: Matrix) -> bool:
    r, c = shape(M)
    return r == c


def transpose(M: Matrix) -> Matrix:
    return tuple(zip(*M)) if M else ()


def mat_mul(F: Field, A: Matrix, B: Matrix) -> Matrix:
    if shape(A)[1] != len(B):
        raise DimensionMismatch(f"cannot multiply {shape(A)} by {shape(B)}")
    cols = list(zip(*B)) if B else []
    if F.characteristic:
        p = F.characteristic
        return tuple(
            tuple(sum(a * b for a, b in zip(row, col)) % p for col in cols) for row in A
        )
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def mat_prod(F: Field, mats: Iterable[Matrix], n: int) -> Matrix:
    out = identity(F, n)
    for M in mats:
        out = mat_mul(F, out, M)
    return out


def mat_vec(F: Field, A: Matrix, v: Vector) -> Vector:
    if A and len(A[0]) != len(v):
        raise DimensionMismatch("matrix/vector size mismatch")
    if F.characteristic:
        p = F.characteristic
        return tuple(sum(a * b for a, b in zip(row, v)) % p for row in A)
    return tuple(sum(a * b for a, b in zip(row, v)) for row in A)


def mat_add(F: Field, A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(F.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(F: Field, A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(F.sub(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(F: Field, c, A: Matrix) -> Matrix:
    return tuple(tuple(F.mul(c, a) for a in row) for row in A)


def rref(F: Field, M: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row-echelon form and pivot columns. Zero rows stay at the bottom."""
    rows = [list(r) for r in M]
    nr, nc = shape(M)
    pivots: list[int] = []
    r = 0
    p = F.characteristic
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        if p:
            rows[r] = [x * inv % p for x in rows[r]]
        else:
            rows[r] = [x * inv for x in rows[r]]
        pr = rows[r]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                if p:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], pr)]
                else:
                    rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows), tuple(pivots)


def rank(F: Field, M: Matrix) -> int:
    return len(rref(F, M)[1])


def det(F: Field, M: Matrix):
    if not is_square(M):
        raise DimensionMismatch("determinant of non-square matrix")
    rows = [list(r) for r in M]
    n = len(rows)
    d = F.one
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return F.zero
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            d = F.neg(d)
        d = F.mul(d, rows[c][c])
        inv = F.inv(rows[c][c])
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = F.mul(rows[i][c], inv)
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], rows[c])]
    return d


def inverse(F: Field, M: Matrix) -> Matrix:
    n, m = shape(M)
    if n != m:
        raise DimensionMismatch("inverse of non-square matrix")
    aug = tuple(tuple(row) + identity(F, n)[i] for i, row in enumerate(M))
    R, piv = rref(F, aug)
    if piv[:n] != tuple(range(n)):
        raise SingularMatrix("matrix is singular")
    return tuple(row[n:] for row in R)


def is_invertible(F: Field, M: Matrix) -> bool:
    return is_square(M) and rank(F, M) == len(M)


def conjugate(F: Field, g: Matrix, A: Matrix, g_inv: Matrix | None = None) -> Matrix:
    """g A g^{-1}."""
    if g_inv is None:
        g_inv = inverse(F, g)
    return mat_mul(F, mat_mul(F, g, A), g_inv)


def kernel(F: Field, M: Matrix, ncols: int | None = None) -> list[Vector]:
    """Basis of {v : M v = 0}, one vector per free column."""
    nc = shape(M)[1] if M else (ncols or 0)
    if not M:
        return [tuple(F.one if i == j else F.zero for i in range(nc)) for j in range(nc)]
    R, piv = rref(F, M)
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for f in free:
        v = [F.zero] * nc
        v[f] = F.one
        for i, pc in enumerate(piv):
            v[pc] = F.neg(R[i][f])
        basis.append(tuple(v))
    return basis


def solve(F: Field, M: Matrix, b: Vector) -> Vector | None:
    """One solution of M x = b, or None."""
    nc = shape(M)[1]
    aug = tuple(tuple(row) + (bi,) for row, bi in zip(M, b))
    R, piv = rref(F, aug)
    if nc in piv:
        return None
    x = [F.zero] * nc
    for i, pc in enumerate(piv):
        x[pc] = R[i][nc]
    return tuple(x)


def block_diagonal(F: Field, blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[F.zero] * n for _ in range(n)]
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return tuple(tuple(r) for r in out)


def submatrix(M: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return tuple(tuple(M[i][j] for j in cols) for i in rows)


def columns_matrix(vectors: Sequence[Vector]) -> Matrix:
    """Matrix whose columns are the given vectors."""
    return tuple(zip(*vectors)) if vectors else ()


def is_identity(F: Field, M: Matrix) -> bool:
    return M == identity(F, len(M))


def all_matrices(F: Field, n: int) -> Iterator[Matrix]:
    elems = list(F.elements())
    for entries in itertools.product(elems, repeat=n * n):
        yield tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n))


def general_linear_group(F: Field, n: int) -> Iterator[Matrix]:
    """All invertible n x n matrices over a finite field."""
    for M in all_matrices(F, n):
        if det(F, M) != 0:
            yield M


def dump_matrix(F: Field, M: Matrix) -> list:
    return [[F.dump(x) for x in row] for row in M]


def load_matrix(F: Field, obj) -> Matrix:
    from .errors import MalformedInput

    if not isinstance(obj, list) or any(not isinstance(r, list) for r in obj):
        raise MalformedInput("matrix must be a list of rows")
    if obj and len({len(r) for r in obj}) != 1:
        raise MalformedInput("ragged matrix")
    return tuple(tuple(F.load(x) for x in row) for row in obj)


@dataclass(frozen=True)
class Subspace:
    """A subspace of F^n stored by its reduced echelon basis (canonical)."""

    field: Field
    n: int
    basis: tuple

    @staticmethod
    def span(F: Field, n: int, vectors: Iterable[Vector]) -> "Subspace":
        vecs = [tuple(F(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != n:
                raise DimensionMismatch(f"vector of length {len(v)} in F^{n}")
        if not vecs:
            return Subspace(F, n, ())
        R, piv = rref(F, tuple(vecs))
        return Subspace(F, n, R[: len(piv)])

    @staticmethod
    def zero(F: Field, n: int) -> "Subspace":
        return Subspace(F, n, ())

    @staticmethod
    def full(F: Field, n: int) -> "Subspace":
        return Subspace(F, n, identity(F, n))

    @staticmethod
    def coordinate(F: Field, n: int, indices: Iterable[int]) -> "Subspace":
        return Subspace.span(F, n, [identity(F, n)[i] for i in indices])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x != 0) for row in self.basis)

    def _check(self, other: "Subspace"):
        if self.n != other.n or self.field != other.field:
            raise DimensionMismatch("subspaces live in different ambient spaces")

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return _sum(self, other)

    def annihilator(self) -> "Subspace":
        """Vectors orthogonal to all of self under the standard pairing."""
        if not self.basis:
            return Subspace.full(self.field, self.n)
        return Subspace.span(self.field, self.n, kernel(self.field, self.basis))

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.n)
        return _meet(self, other)

    def contains_vector(self, v: Vector) -> bool:
        if not any(x != 0 for x in v):
            return True
        return rank(self.field, self.basis + (tuple(v),)) == self.dim

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains_vector(v) for v in self.basis)

    def __lt__(self, other: "Subspace") -> bool:
        return self <= other and self.dim < other.dim

    def image(self, M: Matrix) -> "Subspace":
        return Subspace.span(self.field, len(M), [mat_vec(self.field, M, v) for v in self.basis])

    def is_invariant(self, M: Matrix) -> bool:
        return all(self.contains_vector(mat_vec(self.field, M, v)) for v in self.basis)

    def complement_basis(self) -> list[Vector]:
        """Standard basis vectors at non-pivot columns; they span a complement."""
        piv = set(self.pivots())
        e = identity(self.field, self.n)
        return [e[j] for j in range(self.n) if j not in piv]

    def coordinates(self, v: Vector) -> Vector:
        """Coordinates of v in the echelon basis (v must lie in the subspace)."""
        piv = self.pivots()
        return tuple(v[j] for j in piv)

    def sort_key(self):
        return (self.dim, tuple(tuple(int(x) if self.field.characteristic else x for x in r) for r in self.basis))

    def dump(self) -> list:
        return dump_matrix(self.field, self.basis)

    def __repr__(self) -> str:
        rows = ", ".join("(" + ",".join(str(x) for x in r) + ")" for r in self.basis)
        return f"Subspace(n={self.n}, [{rows}])"


# Stability checks intersect the same few subspaces many times over.
@functools.lru_cache(maxsize=1 << 16)
def _sum(a: Subspace, b: Subspace) -> Subspace:
    if not b.basis:
        return a
    if not a.basis:
        return b
    return Subspace.span(a.field, a.n, a.basis + b.basis)


@functools.lru_cache(maxsize=1 << 16)
def _meet(a: Subspace, b: Subspace) -> Subspace:
    return (a.annihilator() + b.annihilator()).annihilator()


def enumerate_subspaces(F: Field, n: int, dim: int | None = None) -> Iterator[Subspace]:
    """All subspaces of F^n over a finite field, by echelon pattern."""
    elems = list(F.elements())
    dims = range(n + 1) if dim is None else [dim]
    for k in dims:
        for piv in itertools.combinations(range(n), k):
            free = [(r, c) for r in range(k) for c in range(piv[r] + 1, n) if c not in piv]
            for vals in itertools.product(elems, repeat=len(free)):
                rows = [[F.zero] * n for _ in range(k)]
                for r, c in enumerate(piv):
                    rows[r][c] = F.one
                for (r, c), v in zip(free, vals):
                    rows[r][c] = v
                yield Subspace(F, n, tuple(tuple(r) for r in rows))


def count_subspaces(p: int, n: int) -> int:
    total = 0
    for k in range(n + 1):
        num, den = 1, 1
        for i in range(k):
            num *= p ** (n - i) - 1
            den *= p ** (i + 1) - 1
        total += num // den
    return total


def adapted_basis(F: Field, n: int, chain: Sequence[Subspace]) -> list[Vector]:
    """Basis of F^n whose first vectors span the smallest member, then the next, ...

    ``chain`` is a decreasing sequence of subspaces (largest first).
    """
    out: list[Vector] = []
    current = Subspace.zero(F, n)
    for S in reversed(list(chain)):
        for v in S.basis:
            if not current.contains_vector(v):
                out.append(v)
                current = current + Subspace.span(F, n, [v])
    for v in identity(F, n):
        if not current.contains_vector(v):
            out.append(v)
            current = current + Subspace.span(F, n, [v])
    return out


def common_adapted_basis(F: Field, n: int, chain1: Sequence[Subspace], chain2: Sequence[Subspace]) -> list[tuple[Vector, int, int]]:
    """Basis adapted to two decreasing chains at once.

    Returns triples (v, i, j) where v lies in chain1[i] and chain2[j] with the
    largest such indices; the vectors with a given (i, j) project to a basis of
    the bi-graded piece. Two flags always admit such a basis.
    """
    return list(_common_adapted_basis(F, n, tuple(chain1), tuple(chain2)))


@functools.lru_cache(maxsize=1 << 14)
def _common_adapted_basis(F: Field, n: int, chain1: tuple, chain2: tuple) -> tuple:
    out: list[tuple[Vector, int, int]] = []
    c1 = list(chain1) + [Subspace.zero(F, n)]
    c2 = list(chain2) + [Subspace.zero(F, n)]
    for i in reversed(range(len(c1) - 1)):
        for j in reversed(range(len(c2) - 1)):
            piece = c1[i] & c2[j]
            have = (c1[i + 1] & c2[j]) + (c1[i] & c2[j + 1])
            for v in piece.basis:
                if not have.contains_vector(v):
                    out.append((v, i, j))
                    have = have + Subspace.span(F, n, [v])
    return tuple(out)
