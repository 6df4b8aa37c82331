"""Common invariant subspaces of a finite set of matrices.

Two backends:

* ``exhaustive-Fp`` walks every subspace of F_p^n and keeps the invariant
  ones. Always complete.
* ``spin-Q`` spins eigenvectors of the generators and of short words in
  them, then closes under sum and intersection. Completeness is certified when
  a composition series built from the found subspaces has absolutely
  irreducible factors and every simple type T has dim Hom(T, V) <= 1 at each
  stage of the socle recursion. The certified list is then rebuilt from
  scratch and is the full lattice. Otherwise complete=False.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Sequence

from .canonical import invariant_factors, roots_in_field
from .errors import BudgetExceeded, DimensionMismatch, SingularMatrix
from .field import Field
from .linalg import (
    Matrix,
    Subspace,
    enumerate_subspaces,
    identity,
    inverse,
    is_invertible,
    kernel,
    mat_add,
    mat_mul,
    mat_sub,
    mat_vec,
    rref,
    scale,
)

EXHAUSTIVE = "exhaustive-Fp"
SPIN = "spin-Q"
DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class InvariantLattice:
    field: Field
    n: int
    generators: tuple
    subspaces: tuple
    complete: bool
    backend: str

    def proper(self) -> list[Subspace]:
        """Nonzero proper members."""
        return [W for W in self.subspaces if 0 < W.dim < self.n]

    def __contains__(self, W: Subspace) -> bool:
        return W in set(self.subspaces)

    def dump(self) -> dict:
        return {
            "subspaces": [W.dump() for W in self.subspaces],
            "complete": self.complete,
            "backend": self.backend,
        }


def _sorted(subs) -> tuple:
    return tuple(sorted(set(subs), key=Subspace.sort_key))


def _check_gens(F: Field, n: int, gens: Sequence[Matrix]):
    for g in gens:
        if len(g) != n or any(len(r) != n for r in g):
            raise DimensionMismatch("generator of the wrong size")
        if not is_invertible(F, g):
            raise SingularMatrix("generators must be invertible")


def spin(F: Field, gens: Sequence[Matrix], start: Subspace) -> Subspace:
    """Smallest subspace containing ``start`` and preserved by all generators."""
    W = start
    todo = list(W.basis)
    while todo:
        v = todo.pop()
        for g in gens:
            w = mat_vec(F, g, v)
            if not W.contains_vector(w):
                W = W + Subspace.span(F, W.n, [w])
                todo.append(w)
    return W


def lattice_closure(subs: Sequence[Subspace]) -> tuple:
    """Close a family of subspaces under pairwise sum and intersection."""
    found = set(subs)
    frontier = list(found)
    while frontier:
        new = set()
        for A in frontier:
            for B in list(found):
                for C in (A + B, A & B):
                    if C not in found:
                        new.add(C)
        found |= new
        frontier = list(new)
    return _sorted(found)


def lattice_meet_join(lat: InvariantLattice) -> InvariantLattice:
    return InvariantLattice(
        lat.field, lat.n, lat.generators, lattice_closure(lat.subspaces), lat.complete, lat.backend
    )


def enumerate_invariant_subspaces(
    F: Field,
    n: int,
    gens: Sequence[Matrix],
    backend: str | None = None,
    budget: int = DEFAULT_BUDGET,
) -> InvariantLattice:
    gens = tuple(gens)
    _check_gens(F, n, gens)
    if backend is None:
        backend = EXHAUSTIVE if F.is_finite() else SPIN
    if backend == EXHAUSTIVE:
        if not F.is_finite():
            raise ValueError("exhaustive backend needs a finite field")
        if F.characteristic**n > budget:
            raise BudgetExceeded(f"p^n = {F.characteristic ** n} exceeds budget {budget}")
        return _exhaustive(F, n, gens)
    if backend == SPIN:
        return _spin_backend(F, n, gens)
    raise ValueError(f"unknown backend {backend!r}")


@functools.lru_cache(maxsize=4096)
def _exhaustive(F: Field, n: int, gens: tuple) -> InvariantLattice:
    subs = [W for W in enumerate_subspaces(F, n) if all(W.is_invariant(g) for g in gens)]
    return InvariantLattice(F, n, gens, _sorted(subs), True, EXHAUSTIVE)


def words(gens: Sequence[Matrix], F: Field, max_len: int = 3) -> list[Matrix]:
    """Deterministic list of words of length 1..max_len, plus pairwise sums and differences."""
    out = []
    for k in range(1, max_len + 1):
        for w in itertools.product(range(len(gens)), repeat=k):
            M = gens[w[0]]
            for i in w[1:]:
                M = mat_mul(F, M, gens[i])
            out.append(M)
    for a, b in itertools.combinations(range(len(gens)), 2):
        out.append(mat_add(F, gens[a], gens[b]))
        out.append(mat_sub(F, gens[a], gens[b]))
    return out


def eigenspaces(F: Field, M: Matrix) -> list[Subspace]:
    n = len(M)
    facs = invariant_factors(F, M)
    if not facs:
        return []
    out = []
    for lam in roots_in_field(F, facs[-1]):
        shifted = mat_sub(F, M, scale(F, lam, identity(F, n)))
        out.append(Subspace.span(F, n, kernel(F, shifted)))
    return out


def _spin_candidates(F: Field, n: int, gens: Sequence[Matrix]) -> set:
    found = {Subspace.zero(F, n), Subspace.full(F, n)}
    for M in words(gens, F):
        for E in eigenspaces(F, M):
            for v in E.basis:
                found.add(spin(F, gens, Subspace.span(F, n, [v])))
            found.add(spin(F, gens, E))
    return found


@functools.lru_cache(maxsize=1024)
def _spin_backend(F: Field, n: int, gens: tuple) -> InvariantLattice:
    subs = lattice_closure(list(_spin_candidates(F, n, gens)))
    certified = certify_lattice(F, n, gens)
    if certified is None:
        return InvariantLattice(F, n, gens, subs, False, SPIN)
    # every spun subspace must sit inside the certified lattice
    assert set(subs) <= set(certified), "certified lattice misses a found subspace"
    return InvariantLattice(F, n, gens, certified, True, SPIN)


def maximal_chain(subs: Sequence[Subspace], n: int) -> list[Subspace]:
    """Greedy maximal chain 0 = W_0 < W_1 < ... < W_m = V inside a lattice."""
    chain = [min(subs, key=lambda W: W.dim)]
    while chain[-1].dim < n:
        cur = chain[-1]
        above = [W for W in subs if cur < W]
        chain.append(min(above, key=Subspace.sort_key))
    return chain


def induced_action(F: Field, gens: Sequence[Matrix], low: Subspace, high: Subspace) -> list[Matrix]:
    """Matrices of the generators on high/low in a basis of a complement of low in high.

    When high is the whole space the complement is ``low.complement_basis()``.
    """
    n = high.n
    if high.dim == n:
        comp = low.complement_basis()
    else:
        comp = []
        cur = low
        for v in high.basis:
            if not cur.contains_vector(v):
                comp.append(v)
                cur = cur + Subspace.span(F, n, [v])
    basis = list(low.basis) + comp
    P = tuple(zip(*basis))  # columns
    P_inv = _left_inverse(F, P)
    k = len(low.basis)
    out = []
    for g in gens:
        cols = [mat_vec(F, P_inv, mat_vec(F, g, v)) for v in comp]
        out.append(tuple(tuple(cols[j][k + i] for j in range(len(comp))) for i in range(len(comp))))
    return out


def _left_inverse(F: Field, P: Matrix) -> Matrix:
    """Left inverse of a full column rank matrix (coordinates w.r.t. its columns)."""
    nr, nc = len(P), len(P[0]) if P else 0
    ext = list(zip(*P))
    S = Subspace.span(F, nr, ext)
    for v in S.complement_basis():
        ext.append(v)
    Q = inverse(F, tuple(zip(*ext)))
    return Q[:nc]


def algebra_basis(F: Field, n: int, gens: Sequence[Matrix]) -> list[Matrix]:
    """Basis of the unital algebra generated by the matrices."""
    basis: list[Matrix] = []
    flat_rows: list[tuple] = []

    def add(M) -> bool:
        nonlocal flat_rows
        flat = tuple(x for row in M for x in row)
        trial = flat_rows + [flat]
        if len(rref(F, tuple(trial))[1]) > len(flat_rows):
            R, piv = rref(F, tuple(trial))
            flat_rows = list(R[: len(piv)])
            basis.append(M)
            return True
        return False

    add(identity(F, n))
    todo = [identity(F, n)]
    while todo:
        M = todo.pop()
        for g in gens:
            P = mat_mul(F, g, M)
            if add(P):
                todo.append(P)
    return basis


def absolutely_irreducible(F: Field, n: int, gens: Sequence[Matrix]) -> bool:
    """Burnside: the generated algebra is all of M_n."""
    if n == 0:
        return False
    return len(algebra_basis(F, n, gens)) == n * n


def hom_space(F: Field, gens1: Sequence[Matrix], gens2: Sequence[Matrix]) -> list[Matrix]:
    """Basis of {X : X g1 = g2 X for all paired generators}; X maps the first space to the second."""
    a = len(gens1[0]) if gens1 else 0
    b = len(gens2[0]) if gens2 else 0
    if a == 0 or b == 0:
        return []
    rows = []
    for g1, g2 in zip(gens1, gens2):
        # (X g1 - g2 X)[i][j] = sum_k X[i][k] g1[k][j] - sum_k g2[i][k] X[k][j]
        for i in range(b):
            for j in range(a):
                row = [F.zero] * (a * b)
                for k in range(a):
                    row[i * a + k] = F.add(row[i * a + k], g1[k][j])
                for k in range(b):
                    row[k * a + j] = F.sub(row[k * a + j], g2[i][k])
                rows.append(tuple(row))
    sol = kernel(F, tuple(rows), ncols=a * b)
    return [tuple(tuple(v[i * a:(i + 1) * a]) for i in range(b)) for v in sol]


def hom_dimension(F: Field, gens1: Sequence[Matrix], gens2: Sequence[Matrix]) -> int:
    return len(hom_space(F, gens1, gens2))


def composition_factors(F: Field, n: int, gens: Sequence[Matrix]):
    """Factors of a composition series, bottom first, or None if the search stalls.

    A minimal spun submodule is taken as the bottom piece; it must be
    absolutely irreducible, then the search recurses into the quotient.
    """
    if n == 0:
        return []
    cands = [W for W in _spin_candidates(F, n, gens) if W.dim > 0]
    S = min(cands, key=Subspace.sort_key)
    if any(W < S for W in cands):
        return None
    bottom = induced_action(F, gens, Subspace.zero(F, n), S)
    if not absolutely_irreducible(F, S.dim, bottom):
        return None
    rest = composition_factors(F, n - S.dim, induced_action(F, gens, S, Subspace.full(F, n)))
    return None if rest is None else [bottom] + rest


def certify_lattice(F: Field, n: int, gens: Sequence[Matrix]):
    """Return the full submodule lattice if it can be certified, else None.

    Needs a composition series with absolutely irreducible factors. Simple
    submodules of type T are images of nonzero maps T -> V, so when every
    Hom(T, V) has dimension at most one they are finite in number and computed
    exactly; recursing into V/S lists every submodule.
    """
    factors = composition_factors(F, n, gens)
    if factors is None:
        return None
    types: list = []
    for fac in factors:
        if not any(len(t[0]) == len(fac[0]) and hom_dimension(F, t, fac) for t in types):
            types.append(fac)
    out = _submodules(F, n, tuple(gens), tuple(tuple(t) for t in types))
    return None if out is None else _sorted(out)


def _submodules(F: Field, n: int, gens: tuple, types: tuple):
    if n == 0:
        return {Subspace.zero(F, 0)}
    found = {Subspace.zero(F, n)}
    for T in types:
        if len(T[0]) > n:
            continue
        H = hom_space(F, T, gens)
        if not H:
            continue
        if len(H) > 1:
            return None
        X = H[0]
        S = Subspace.span(F, n, list(zip(*X)))
        comp = S.complement_basis()
        quot = induced_action(F, gens, S, Subspace.full(F, n))
        below = _submodules(F, n - S.dim, tuple(quot), types)
        if below is None:
            return None
        for W in below:
            lifted = [tuple(sum((c * v[k] for c, v in zip(w, comp)), F.zero) for k in range(n)) for w in W.basis]
            found.add(S + Subspace.span(F, n, lifted))
    return found
