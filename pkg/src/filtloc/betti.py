"""Fixed Levi monodromy: membership of a quiver point in the Betti locus.

gamma_x is a torus weight per puncture. P_{-gamma} keeps the span of the
coordinates with gamma <= w for every w, and its Levi is block diagonal on the
groups of coordinates sharing a gamma value. Blocks are listed by increasing
gamma.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .canonical import are_conjugate
from .errors import DimensionMismatch, MalformedInput, PreconditionError
from .field import Field
from .linalg import Matrix, dump_matrix, is_invertible, load_matrix, mat_mul
from .quiver import QuiverPoint, in_arrow, out_arrow
from .rootdatum import g_quiver_membership


def gamma_blocks(gamma: Sequence) -> list[list[int]]:
    g = [Fraction(x) for x in gamma]
    return [[i for i, x in enumerate(g) if x == v] for v in sorted(set(g))]


def levi_part(M: Matrix, gamma: Sequence) -> list[Matrix]:
    return [tuple(tuple(M[r][c] for c in idx) for r in idx) for idx in gamma_blocks(gamma)]


@dataclass(frozen=True)
class MonodromyDatum:
    gammas: tuple  # per puncture
    blocks: tuple  # per puncture, invertible blocks by increasing gamma

    def __post_init__(self):
        if len(self.gammas) != len(self.blocks):
            raise DimensionMismatch("one gamma and one block list per puncture")
        for gamma, blks in zip(self.gammas, self.blocks):
            sizes = [len(idx) for idx in gamma_blocks(gamma)]
            if [len(b) for b in blks] != sizes:
                raise DimensionMismatch("block sizes do not match the Levi of gamma")


def make_monodromy(F: Field, gammas: Sequence[Sequence], blocks: Sequence[Sequence[Matrix]]) -> MonodromyDatum:
    conv = lambda M: tuple(tuple(F(v) for v in row) for row in M)  # noqa: E731
    blks = tuple(tuple(conv(b) for b in row) for row in blocks)
    for row in blks:
        for b in row:
            if not is_invertible(F, b):
                raise PreconditionError("Levi blocks must be invertible")
    return MonodromyDatum(tuple(tuple(Fraction(x) for x in g) for g in gammas), blks)


def levi_monodromy_map(point: QuiverPoint, gammas: Sequence[Sequence]) -> list[list[Matrix]]:
    """Levi factor of g_x c_x g_x^{-1} with g_x = in, i.e. of in * out."""
    if len(gammas) != len(point.punctures):
        raise DimensionMismatch("one gamma per puncture")
    if g_quiver_membership(point, gammas) is None:
        raise PreconditionError("point is not in the gamma-membership locus")
    F = point.field
    return [
        levi_part(mat_mul(F, point[in_arrow(x)], point[out_arrow(x)]), g)
        for x, g in zip(point.punctures, gammas)
    ]


def in_betti_locus(point: QuiverPoint, M: MonodromyDatum, strict: bool = False) -> bool:
    """Levi monodromy L-conjugate to M at every puncture (equal on the nose when ``strict``)."""
    if g_quiver_membership(point, M.gammas) is None:
        return False
    F = point.field
    for got, want in zip(levi_monodromy_map(point, M.gammas), M.blocks):
        for a, b in zip(got, want):
            if strict:
                if a != b:
                    return False
            elif not are_conjugate(F, a, b):
                return False
    return True


def dump_monodromy(F: Field, punctures: Sequence[str], M: MonodromyDatum) -> tuple[dict, dict]:
    gam = {x: [str(w) for w in g] for x, g in zip(punctures, M.gammas)}
    blk = {x: {"blocks": [dump_matrix(F, b) for b in row]} for x, row in zip(punctures, M.blocks)}
    return gam, blk


def load_monodromy(F: Field, punctures: Sequence[str], gamma_obj: Mapping, m_obj: Mapping) -> MonodromyDatum:
    try:
        gammas = [[Fraction(str(w)) for w in gamma_obj[x]] for x in punctures]
        blocks = [[load_matrix(F, b) for b in m_obj[x]["blocks"]] for x in punctures]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput("gamma / monodromy JSON needs an entry per puncture") from exc
    try:
        return make_monodromy(F, gammas, blocks)
    except PreconditionError as exc:
        raise MalformedInput(str(exc)) from exc
