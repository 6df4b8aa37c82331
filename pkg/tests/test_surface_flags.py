from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from filtloc.errors import NotInvariant, PreconditionError
from filtloc.field import QQ, PrimeField
from filtloc.flags import (
    Flag,
    GradedCocharacter,
    ParabolicGL,
    cochar_limit,
    cochar_to_flag,
    flag_to_cochar,
    in_cochar_parabolic,
    levi_factor,
    parabolic_membership,
)
from filtloc.linalg import Subspace, enumerate_subspaces, general_linear_group, identity
from filtloc.quiver import build_punctured_quiver
from filtloc.sampling import worked_example, random_invertible
from filtloc.surface import (
    conjugate_rep,
    invariant_lattice,
    is_irreducible,
    make_rep,
    quotient,
    restrict,
    verify_relation,
)

F3, F5 = PrimeField(3), PrimeField(5)


def test_relation_examples():
    assert verify_relation(worked_example().rep)
    assert verify_relation(make_rep(QQ, 1, [], 2, [identity(QQ, 2)], [identity(QQ, 2)]))
    assert not verify_relation(make_rep(QQ, 0, ["x"], 2, C={"x": [[2, 0], [0, 1]]}, check=False))
    with pytest.raises(PreconditionError):
        make_rep(QQ, 0, ["x"], 2, C={"x": [[2, 0], [0, 1]]})


@given(st.integers(0, 10**6))
def test_relation_invariant_under_conjugation(seed):
    rng = random.Random(seed)
    rep = worked_example(F5).rep
    g = random_invertible(F5, 2, rng)
    assert verify_relation(conjugate_rep(rep, g))


def test_restrict_to_the_invariant_line():
    rep = worked_example().rep
    line = Subspace.span(QQ, 2, [(1, 0)])
    sub = restrict(rep, line)
    assert sub.n == 1 and all(c == ((1,),) for c in sub.C)
    assert restrict(rep, Subspace.full(QQ, 2)) == rep
    assert restrict(rep, Subspace.zero(QQ, 2)).n == 0
    assert quotient(rep, line).n == 1
    with pytest.raises(NotInvariant):
        restrict(rep, Subspace.span(QQ, 2, [(0, 1)]))


def test_worked_example_lattice_and_irreducibility():
    rep = worked_example().rep
    lat = invariant_lattice(rep)
    assert lat.complete
    assert lat.proper() == [Subspace.span(QQ, 2, [(1, 0)])]
    assert is_irreducible(rep) is False


def test_irreducibility_against_subspace_scan():
    # permutation generators of S_2 plus a non-scalar diagonal
    swap, diag = ((0, 1), (1, 0)), ((2, 0), (0, 3))
    rep = make_rep(F5, 0, ["x1", "x2", "x3", "x4"], 2, C=[swap, swap, diag, ((3, 0), (0, 2))])
    scan = [S for S in enumerate_subspaces(F5, 2, 1) if S.is_invariant(swap) and S.is_invariant(diag)]
    assert is_irreducible(rep) == (not scan)
    assert is_irreducible(make_rep(QQ, 0, ["x"], 1, C={"x": [[1]]}))


@pytest.mark.parametrize("genus,punctures,vertices,arrows", [(0, 3, 4, 6), (1, 0, 1, 2), (2, 1, 2, 6)])
def test_quiver_shape(genus, punctures, vertices, arrows):
    Q = build_punctured_quiver(genus, [f"x{i}" for i in range(punctures)]).quiver
    assert len(Q.vertices) == vertices and len(Q.arrows) == arrows


def test_parabolic_membership_examples():
    P = ParabolicGL(Flag.standard(QQ, (1, 1)))
    assert parabolic_membership(P, ((1, 7), (0, 2)))
    assert not parabolic_membership(P, ((0, 1), (1, 0)))
    assert levi_factor(P, ((1, 1), (0, 1))) == identity(QQ, 2)


def test_parabolic_membership_brute_force_f5():
    rng = random.Random(5)
    for _ in range(30):
        g0 = random_invertible(F5, 3, rng)
        flag = Flag.standard(F5, (1, 1, 1)).image(g0)
        P = ParabolicGL(flag)
        for _ in range(10):
            g = random_invertible(F5, 3, rng)
            direct = all(S.image(g) == S for S in flag.steps)
            assert parabolic_membership(P, g) == direct


def test_cochar_flag_round_trip_f3():
    for k in (1, 2):
        for f in [Flag.trivial(F3, 2)] + [Flag.from_subspaces(F3, 2, [L]) for L in enumerate_subspaces(F3, 2, 1)]:
            if f.length != k:
                continue
            weights = list(range(k, 0, -1))
            mu = flag_to_cochar(f, weights)
            assert cochar_to_flag(mu) == f


def test_cochar_examples():
    central = GradedCocharacter(QQ, (1,), (2,), identity(QQ, 2))
    assert cochar_to_flag(central) == Flag.trivial(QQ, 2)
    mu = GradedCocharacter.from_columns(QQ, [(1, 0), (0, 1)], [1, 0])
    assert cochar_to_flag(mu).steps[1] == Subspace.span(QQ, 2, [(1, 0)])


def test_limit_exists_iff_flag_stabilized_f3():
    G = list(general_linear_group(F3, 2))
    for L in enumerate_subspaces(F3, 2, 1):
        f = Flag.from_subspaces(F3, 2, [L])
        mu = flag_to_cochar(f, [1, 0])
        for g in G:
            assert in_cochar_parabolic(mu, g) == parabolic_membership(ParabolicGL(f), g)


def test_limit_direction_convention():
    # diag(t, 1): conjugating an upper unipotent scales the corner by t, so the limit exists
    up = ((1, 1), (0, 1))
    mu = GradedCocharacter.from_columns(QQ, [(1, 0), (0, 1)], [1, 0])
    assert cochar_limit(QQ, mu, up, mu) == identity(QQ, 2)
    # diag(1, t) scales it by 1/t
    opp = GradedCocharacter.from_columns(QQ, [(1, 0), (0, 1)], [0, 1])
    assert cochar_limit(QQ, opp, up, opp) is None
    assert cochar_limit(QQ, opp, ((1, 0), (1, 1)), opp) == identity(QQ, 2)


def test_levi_factor_idempotent_f7():
    F7 = PrimeField(7)
    rng = random.Random(7)
    P = ParabolicGL(Flag.standard(F7, (2, 1)))
    for _ in range(20):
        g = random_invertible(F7, 3, rng)
        # force g into P by zeroing the entries below the blocks
        rows = [list(r) for r in g]
        for r, c in itertools.product(range(3), range(3)):
            if not parabolic_membership(P, tuple(tuple(x) for x in rows)):
                if r > c:
                    rows[r][c] = 0
        p = tuple(tuple(r) for r in rows)
        if not parabolic_membership(P, p):
            continue
        L = levi_factor(P, p)
        assert levi_factor(P, L) == L
