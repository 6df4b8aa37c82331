"""Representations of the fundamental group of a punctured closed surface.

The group has generators a_1..a_g, b_1..b_g and c_x for each puncture, with
the single relation  prod_i [a_i, b_i] * prod_x c_x = 1. Punctures are
multiplied in the order they are listed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DimensionMismatch, MalformedInput, NotInvariant, PreconditionError, SingularMatrix
from .field import Field, QQ, detect_field
from .linalg import (
    Matrix,
    Subspace,
    conjugate,
    dump_matrix,
    identity,
    inverse,
    is_invertible,
    load_matrix,
    mat_mul,
    mat_vec,
)


@dataclass(frozen=True)
class SurfacePresentation:
    genus: int
    punctures: tuple = ()

    def __post_init__(self):
        if self.genus < 0:
            raise PreconditionError("genus must be non-negative")
        if len(set(self.punctures)) != len(self.punctures):
            raise PreconditionError("puncture labels must be distinct")

    def generator_names(self) -> list[str]:
        g = self.genus
        return [f"a{i + 1}" for i in range(g)] + [f"b{i + 1}" for i in range(g)] + [
            f"c_{x}" for x in self.punctures
        ]


@dataclass(frozen=True)
class SurfaceRep:
    """Images of the generators; invertibility is checked on construction.

    Use :func:`make_rep` to also enforce the relation.
    """

    field: Field
    presentation: SurfacePresentation
    n: int
    A: tuple
    B: tuple
    C: tuple  # matrices in puncture order

    def __post_init__(self):
        g = self.presentation.genus
        if len(self.A) != g or len(self.B) != g or len(self.C) != len(self.presentation.punctures):
            raise DimensionMismatch("generator count does not match the presentation")
        for M in self.generators():
            if len(M) != self.n or any(len(r) != self.n for r in M):
                raise DimensionMismatch(f"generator is not {self.n}x{self.n}")
            if self.n and not is_invertible(self.field, M):
                raise SingularMatrix("generator matrices must be invertible")

    @property
    def genus(self) -> int:
        return self.presentation.genus

    @property
    def punctures(self) -> tuple:
        return self.presentation.punctures

    def c(self, x: str) -> Matrix:
        return self.C[self.punctures.index(x)]

    def generators(self) -> tuple:
        return tuple(self.A) + tuple(self.B) + tuple(self.C)


def make_rep(
    F: Field,
    genus: int,
    punctures: Sequence[str],
    n: int,
    A: Sequence[Matrix] = (),
    B: Sequence[Matrix] = (),
    C: Mapping[str, Matrix] | Sequence[Matrix] = (),
    check: bool = True,
) -> SurfaceRep:
    pres = SurfacePresentation(genus, tuple(punctures))
    if isinstance(C, Mapping):
        missing = set(pres.punctures) - set(C)
        if missing or set(C) - set(pres.punctures):
            raise DimensionMismatch("puncture matrices do not match the puncture list")
        C = [C[x] for x in pres.punctures]
    conv = lambda M: tuple(tuple(F(x) for x in row) for row in M)  # noqa: E731
    rep = SurfaceRep(F, pres, n, tuple(map(conv, A)), tuple(map(conv, B)), tuple(map(conv, C)))
    if check and not verify_relation(rep):
        raise PreconditionError("the surface relation does not hold")
    return rep


def commutator(F: Field, a: Matrix, b: Matrix) -> Matrix:
    return mat_mul(F, mat_mul(F, a, b), mat_mul(F, inverse(F, a), inverse(F, b)))


def relation_product(rep: SurfaceRep) -> Matrix:
    F = rep.field
    out = identity(F, rep.n)
    for a, b in zip(rep.A, rep.B):
        out = mat_mul(F, out, commutator(F, a, b))
    for c in rep.C:
        out = mat_mul(F, out, c)
    return out


def verify_relation(rep: SurfaceRep) -> bool:
    return relation_product(rep) == identity(rep.field, rep.n)


def conjugate_rep(rep: SurfaceRep, g: Matrix) -> SurfaceRep:
    """The representation g rho g^{-1}."""
    F = rep.field
    gi = inverse(F, g)
    conj = lambda M: conjugate(F, g, M, gi)  # noqa: E731
    return SurfaceRep(F, rep.presentation, rep.n, tuple(map(conj, rep.A)), tuple(map(conj, rep.B)), tuple(map(conj, rep.C)))


def invariance_witness(rep: SurfaceRep, W: Subspace):
    """(generator name, vector) with g v outside W, or None if W is invariant."""
    F = rep.field
    for name, g in zip(rep.presentation.generator_names(), rep.generators()):
        for v in W.basis:
            if not W.contains_vector(mat_vec(F, g, v)):
                return name, v
    return None


def _require_invariant(rep: SurfaceRep, W: Subspace):
    if W.n != rep.n:
        raise DimensionMismatch("subspace lives in the wrong ambient space")
    bad = invariance_witness(rep, W)
    if bad is not None:
        raise NotInvariant(f"{bad[0]} moves {bad[1]} out of the subspace", bad[0], bad[1])


def adapted_change_of_basis(rep: SurfaceRep, W: Subspace) -> tuple[Matrix, int]:
    """Matrix P whose first dim W columns span W and the rest a complement."""
    cols = list(W.basis) + W.complement_basis()
    return tuple(zip(*cols)), W.dim


def restrict(rep: SurfaceRep, W: Subspace) -> SurfaceRep:
    """Representation on W in its echelon basis."""
    _require_invariant(rep, W)
    F = rep.field
    k = W.dim

    def res(M):
        cols = [W.coordinates(mat_vec(F, M, v)) for v in W.basis]
        return tuple(tuple(cols[j][i] for j in range(k)) for i in range(k))

    return SurfaceRep(F, rep.presentation, k, tuple(map(res, rep.A)), tuple(map(res, rep.B)), tuple(map(res, rep.C)))


def quotient(rep: SurfaceRep, W: Subspace) -> SurfaceRep:
    """Representation on V/W in the basis given by W.complement_basis()."""
    _require_invariant(rep, W)
    F = rep.field
    P, k = adapted_change_of_basis(rep, W)
    P_inv = inverse(F, P)
    m = rep.n - k

    def quo(M):
        Q = mat_mul(F, mat_mul(F, P_inv, M), P)
        return tuple(tuple(Q[k + i][k + j] for j in range(m)) for i in range(m))

    return SurfaceRep(F, rep.presentation, m, tuple(map(quo, rep.A)), tuple(map(quo, rep.B)), tuple(map(quo, rep.C)))


def invariant_lattice(rep: SurfaceRep, backend: str | None = None):
    from .invariant import enumerate_invariant_subspaces

    gens = rep.generators() or (identity(rep.field, rep.n),)
    return enumerate_invariant_subspaces(rep.field, rep.n, gens, backend=backend)


def is_irreducible(rep: SurfaceRep) -> bool:
    """Irreducibility over the algebraic closure (F_p itself for finite fields).

    Over Q a Burnside dimension count certifies irreducibility; otherwise a
    found proper invariant subspace certifies reducibility.
    """
    from .errors import IncompleteCertificate
    from .invariant import absolutely_irreducible

    if rep.n < 1:
        raise PreconditionError("rank must be at least one")
    if rep.n == 1:
        return True
    F = rep.field
    gens = rep.generators() or (identity(F, rep.n),)
    if not F.is_finite() and absolutely_irreducible(F, rep.n, gens):
        return True
    lat = invariant_lattice(rep)
    if lat.proper():
        return False
    if not lat.complete:
        raise IncompleteCertificate("no rational invariant subspace found and none certified absent")
    return True


def dump_rep(rep: SurfaceRep) -> dict:
    F = rep.field
    return {
        "genus": rep.genus,
        "punctures": list(rep.punctures),
        "rank": rep.n,
        "A": [dump_matrix(F, M) for M in rep.A],
        "B": [dump_matrix(F, M) for M in rep.B],
        "C": {x: dump_matrix(F, M) for x, M in zip(rep.punctures, rep.C)},
    }


def load_rep(obj: dict, check: bool = True, F: Field | None = None) -> SurfaceRep:
    try:
        genus = obj["genus"]
        punctures = obj.get("punctures", [])
        n = obj["rank"]
        A_raw, B_raw, C_raw = obj.get("A", []), obj.get("B", []), obj.get("C", {})
    except (KeyError, TypeError, AttributeError) as exc:
        raise MalformedInput(f"representation JSON is missing {exc}") from exc
    if not isinstance(genus, int) or not isinstance(n, int) or not isinstance(C_raw, dict):
        raise MalformedInput("bad representation JSON")
    if F is None:
        F = _field_from_any(A_raw, B_raw, C_raw)
    A = [load_matrix(F, M) for M in A_raw]
    B = [load_matrix(F, M) for M in B_raw]
    if set(C_raw) != set(punctures):
        raise MalformedInput("C must have one matrix per puncture")
    C = {x: load_matrix(F, C_raw[x]) for x in punctures}
    return make_rep(F, genus, punctures, n, A, B, C, check=check)


def _field_from_any(*objs) -> Field:
    def walk(o):
        if isinstance(o, dict):
            if "mod" in o and "val" in o:
                yield o
            else:
                for v in o.values():
                    yield from walk(v)
        elif isinstance(o, list):
            for v in o:
                yield from walk(v)
        else:
            yield o

    for leaf in walk(list(objs)):
        return detect_field(leaf)
    return QQ
