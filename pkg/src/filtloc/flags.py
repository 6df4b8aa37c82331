"""Flags, parabolic subgroups of GL_n stored as flag stabilizers, and graded cocharacters.

A flag is V = V_1 > V_2 > ... > V_{k+1} = 0. Piece i is V_i / V_{i+1}; the
partition lists the piece dimensions, top piece first. Adapted bases list the
deepest piece first, so the standard flag of a partition has V_i spanned by
an initial segment of the coordinate vectors and its parabolic is block upper
triangular.

A graded cocharacter mu(t) = P diag(t^{w_1}, ..., t^{w_n}) P^{-1} is stored by
its basis P (columns) and strictly decreasing weights with multiplicities.
The flag it defines is the chain of sums of eigenspaces of weight >= w, and
its parabolic {g : lim mu(t) g mu(t)^{-1} exists} is that flag's stabilizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, MalformedInput, PreconditionError
from .field import Field
from .linalg import (
    Matrix,
    Subspace,
    adapted_basis,
    block_diagonal,
    dump_matrix,
    identity,
    inverse,
    is_invertible,
    load_matrix,
    mat_mul,
)


@dataclass(frozen=True)
class Flag:
    field: Field
    n: int
    steps: tuple  # V_1 = F^n, ..., V_k, then 0

    def __post_init__(self):
        s = self.steps
        if not s or s[0].dim != self.n or s[-1].dim != 0:
            raise PreconditionError("a flag runs from the whole space down to zero")
        for a, b in zip(s, s[1:]):
            if not (b < a):
                raise PreconditionError("flag steps must be strictly decreasing")

    @staticmethod
    def from_subspaces(F: Field, n: int, subs: Sequence[Subspace]) -> "Flag":
        """Build from any decreasing list; the whole space and zero are added if absent."""
        subs = list(subs)
        if not subs or subs[0].dim != n:
            subs.insert(0, Subspace.full(F, n))
        if subs[-1].dim != 0:
            subs.append(Subspace.zero(F, n))
        return Flag(F, n, tuple(subs))

    @staticmethod
    def trivial(F: Field, n: int) -> "Flag":
        return Flag.from_subspaces(F, n, [])

    @staticmethod
    def standard(F: Field, partition: Sequence[int]) -> "Flag":
        n = sum(partition)
        steps, top = [], n
        for lam in partition:
            steps.append(Subspace.coordinate(F, n, range(top)))
            top -= lam
        return Flag.from_subspaces(F, n, steps)

    @property
    def length(self) -> int:
        """Number of pieces."""
        return len(self.steps) - 1

    @property
    def partition(self) -> tuple:
        return tuple(a.dim - b.dim for a, b in zip(self.steps, self.steps[1:]))

    def proper_steps(self) -> list[Subspace]:
        return [S for S in self.steps if 0 < S.dim < self.n]

    def basis(self) -> list:
        """Adapted basis, deepest piece first."""
        return adapted_basis(self.field, self.n, self.steps[:-1])

    def basis_matrix(self) -> Matrix:
        return tuple(zip(*self.basis()))

    def piece_of_basis(self) -> list[int]:
        """Piece index (0-based, top piece = 0) of each adapted basis vector."""
        out = []
        for i in reversed(range(self.length)):
            out += [i] * self.partition[i]
        return out

    def image(self, g: Matrix) -> "Flag":
        return Flag(self.field, self.n, tuple(S.image(g) for S in self.steps))

    def is_stable_under(self, g: Matrix) -> bool:
        return all(S.is_invariant(g) for S in self.steps)

    def dump(self) -> dict:
        return {"ambient": self.n, "steps": [S.dump() for S in self.steps]}


def load_flag(F: Field, obj) -> Flag:
    try:
        n = obj["ambient"] if "ambient" in obj else None
        raw = obj["steps"]
    except (KeyError, TypeError) as exc:
        raise MalformedInput("flag JSON needs 'steps'") from exc
    subs = []
    for M in raw:
        if not M:
            if n is None:
                raise MalformedInput("zero step needs the ambient dimension")
            subs.append(Subspace.zero(F, n))
            continue
        mat = load_matrix(F, M)
        if n is None:
            n = len(mat[0])
        subs.append(Subspace.span(F, n, mat))
    if n is None:
        raise MalformedInput("cannot infer flag ambient dimension")
    return Flag.from_subspaces(F, n, subs)


@dataclass(frozen=True)
class ParabolicGL:
    """The stabilizer of a flag."""

    flag: Flag

    @property
    def partition(self) -> tuple:
        return self.flag.partition

    @property
    def n(self) -> int:
        return self.flag.n


def parabolic_membership(P: ParabolicGL, g: Matrix) -> bool:
    if len(g) != P.n:
        raise DimensionMismatch("matrix size does not match the parabolic")
    return P.flag.is_stable_under(g)


def levi_blocks(P: ParabolicGL, p: Matrix) -> list[Matrix]:
    """Matrices of p on each piece V_i/V_{i+1}, top piece first, in the adapted basis."""
    if not parabolic_membership(P, p):
        raise PreconditionError("element is not in the parabolic")
    F = P.flag.field
    B = P.flag.basis_matrix()
    X = mat_mul(F, mat_mul(F, inverse(F, B), p), B)
    pieces = P.flag.piece_of_basis()
    out = []
    for i in range(P.flag.length):
        idx = [k for k, q in enumerate(pieces) if q == i]
        out.append(tuple(tuple(X[r][c] for c in idx) for r in idx))
    return out


def levi_factor(P: ParabolicGL, p: Matrix) -> Matrix:
    """Block-diagonal part of p in the adapted basis, expressed in the original coordinates."""
    F = P.flag.field
    blocks = levi_blocks(P, p)
    B = P.flag.basis_matrix()
    L = block_diagonal(F, list(reversed(blocks)))
    return mat_mul(F, mat_mul(F, B, L), inverse(F, B))


def levi_membership(P: ParabolicGL, g: Matrix) -> bool:
    return parabolic_membership(P, g) and levi_factor(P, g) == g


@dataclass(frozen=True)
class GradedCocharacter:
    field: Field
    weights: tuple  # strictly decreasing integers
    mults: tuple
    basis: Matrix  # columns; the first mults[0] columns carry weights[0]

    def __post_init__(self):
        if any(not isinstance(w, int) for w in self.weights):
            raise PreconditionError("cocharacter weights must be integers")
        if any(a <= b for a, b in zip(self.weights, self.weights[1:])):
            raise PreconditionError("cocharacter weights must be strictly decreasing")
        if len(self.weights) != len(self.mults) or any(m < 1 for m in self.mults):
            raise PreconditionError("one positive multiplicity per weight")
        if sum(self.mults) != len(self.basis) or not is_invertible(self.field, self.basis):
            raise PreconditionError("cocharacter basis must be invertible of size sum(mults)")

    @property
    def n(self) -> int:
        return len(self.basis)

    def column_weights(self) -> list[int]:
        out = []
        for w, m in zip(self.weights, self.mults):
            out += [w] * m
        return out

    def scaled(self, m: int) -> "GradedCocharacter":
        if m <= 0:
            raise PreconditionError("scale factor must be positive")
        return GradedCocharacter(self.field, tuple(m * w for w in self.weights), self.mults, self.basis)

    def is_central(self) -> bool:
        return len(self.weights) == 1

    @staticmethod
    def trivial(F: Field, n: int) -> "GradedCocharacter":
        return GradedCocharacter(F, (0,), (n,), identity(F, n))

    @staticmethod
    def from_columns(F: Field, basis_cols: Sequence, weights: Sequence[int]) -> "GradedCocharacter":
        """Eigenvectors with their weights, in any order."""
        order = sorted(range(len(weights)), key=lambda i: -weights[i])
        ws, ms = [], []
        for i in order:
            if ws and ws[-1] == weights[i]:
                ms[-1] += 1
            else:
                ws.append(weights[i])
                ms.append(1)
        cols = [tuple(basis_cols[i]) for i in order]
        return GradedCocharacter(F, tuple(ws), tuple(ms), tuple(zip(*cols)))

    def dump(self) -> dict:
        return {"weights": list(self.weights), "mults": list(self.mults), "basis": dump_matrix(self.field, self.basis)}


def load_cochar(F: Field, obj) -> GradedCocharacter:
    """Without "mults", "weights" gives one weight per basis column."""
    try:
        basis = load_matrix(F, obj["basis"])
        if "mults" not in obj:
            if len(obj["weights"]) != len(basis):
                raise MalformedInput("without mults, give one weight per basis column")
            return GradedCocharacter.from_columns(F, list(zip(*basis)), [int(w) for w in obj["weights"]])
        return GradedCocharacter(F, tuple(obj["weights"]), tuple(obj["mults"]), basis)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput("cocharacter JSON needs weights, basis and optionally mults") from exc


def cochar_to_flag(mu: GradedCocharacter) -> Flag:
    F, n = mu.field, mu.n
    cols = list(zip(*mu.basis))
    cw = mu.column_weights()
    steps = [Subspace.span(F, n, [c for c, w in zip(cols, cw) if w >= t]) for t in reversed(mu.weights)]
    return Flag.from_subspaces(F, n, steps)


def flag_to_cochar(f: Flag, weights: Sequence[int]) -> GradedCocharacter:
    """Weights are strictly decreasing; the largest goes on the deepest piece."""
    if len(weights) != f.length:
        raise PreconditionError("need exactly one weight per flag piece")
    mults = tuple(reversed(f.partition))
    return GradedCocharacter(f.field, tuple(weights), mults, f.basis_matrix())


def cochar_limit(F: Field, mu_t: GradedCocharacter, phi: Matrix, mu_s: GradedCocharacter):
    """lim_{t->0} mu_t(t) phi mu_s(t)^{-1}, or None if some entry diverges."""
    X = mat_mul(F, mat_mul(F, inverse(F, mu_t.basis), phi), mu_s.basis)
    wt, ws = mu_t.column_weights(), mu_s.column_weights()
    Y = []
    for r, row in enumerate(X):
        out = []
        for c, x in enumerate(row):
            if x != 0 and wt[r] < ws[c]:
                return None
            out.append(x if wt[r] == ws[c] else F.zero)
        Y.append(tuple(out))
    return mat_mul(F, mat_mul(F, mu_t.basis, tuple(Y)), inverse(F, mu_s.basis))


def in_cochar_parabolic(mu: GradedCocharacter, g: Matrix) -> bool:
    return cochar_limit(mu.field, mu, g, mu) is not None


def transport_cochar(mu: GradedCocharacter, g: Matrix) -> GradedCocharacter:
    """g mu g^{-1}."""
    return GradedCocharacter(mu.field, mu.weights, mu.mults, mat_mul(mu.field, g, mu.basis))


def cochar_matrix_exponents(mu: GradedCocharacter) -> tuple:
    """mu(t) as P, exponent list: mu(t) = P diag(t^e) P^{-1}."""
    return mu.basis, tuple(mu.column_weights())
