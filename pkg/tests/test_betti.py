from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from filtloc.betti import (
    dump_monodromy,
    gamma_blocks,
    in_betti_locus,
    levi_monodromy_map,
    load_monodromy,
    make_monodromy,
)
from filtloc.errors import DimensionMismatch, MalformedInput, PreconditionError
from filtloc.field import QQ, PrimeField
from filtloc.linalg import identity, inverse, mat_mul
from filtloc.quiver import gauge_act, rep_to_point
from filtloc.rootdatum import theta_vector
from filtloc.sampling import degree_zero_weights, worked_example, random_gauge, sample_fls

F7 = PrimeField(7)
ONE = ((1,),)


def _worked():
    fls = worked_example()
    point, _ = rep_to_point(fls)
    return point, [theta_vector(wf) for wf in fls.flags]


def test_gamma_blocks_order():
    assert gamma_blocks((Fraction(1, 3), Fraction(-1, 3), Fraction(1, 3))) == [[1], [0, 2]]


def test_unipotent_monodromy_has_identity_levi_part():
    point, gammas = _worked()
    levi = levi_monodromy_map(point, gammas)
    assert levi[0] == [ONE, ONE] and levi[1] == [ONE, ONE]
    assert levi[2] == [identity(QQ, 2)]


def test_worked_example_locus():
    point, gammas = _worked()
    M = make_monodromy(QQ, gammas, [[ONE, ONE], [ONE, ONE], [identity(QQ, 2)]])
    assert in_betti_locus(point, M)
    assert in_betti_locus(point, M, strict=True)
    other = make_monodromy(QQ, gammas, [[((2,),), ONE], [ONE, ONE], [identity(QQ, 2)]])
    assert not in_betti_locus(point, other)


def test_block_diagonal_monodromy_is_returned_unchanged():
    from filtloc.filtered import WeightedFlag, make_fls
    from filtloc.surface import make_rep

    D = ((2, 0), (0, 3))
    rep = make_rep(F7, 0, ["x", "y"], 2, C={"x": D, "y": ((4, 0), (0, 5))})
    wf = WeightedFlag.standard(F7, (1, 1), (Fraction(1, 3), Fraction(-1, 3)))
    fls = make_fls(rep, [wf, wf.__class__.standard(F7, (1, 1), (Fraction(-1, 3), Fraction(1, 3)))])
    point, _ = rep_to_point(fls)
    levi = levi_monodromy_map(point, [theta_vector(w) for w in fls.flags])
    assert levi[0] == [((2,),), ((3,),)]


def test_trivial_gamma_puts_no_constraint_beyond_conjugacy():
    point, _ = _worked()
    gammas = [(0, 0)] * 3
    whole = levi_monodromy_map(point, gammas)
    M = make_monodromy(QQ, gammas, whole)
    assert in_betti_locus(point, M)


def _sample(seed):
    rng = random.Random(seed)
    types = {"x": (1, 1, 1), "y": (2, 1)}
    ws = {x: sorted(w, reverse=True) for x, w in degree_zero_weights(types, rng).items()}
    return sample_fls(F7, 0, list(types), 3, types, ws, rng)


@given(st.integers(0, 10**6))
def test_locus_is_gauge_invariant(seed):
    rng = random.Random(seed)
    fls = _sample(seed)
    point, _ = rep_to_point(fls)
    gammas = [theta_vector(wf) for wf in fls.flags]
    M = make_monodromy(F7, gammas, levi_monodromy_map(point, gammas))
    g = random_gauge(F7, 3, [wf.partition for wf in fls.flags], rng)
    moved = gauge_act(point, g)
    assert in_betti_locus(moved, M)


def test_strict_equality_separates_conjugate_blocks():
    P = ((1, 1), (0, 1))
    for seed in range(30):
        fls = _sample(seed)
        point, _ = rep_to_point(fls)
        gammas = [theta_vector(wf) for wf in fls.flags]
        levi = levi_monodromy_map(point, gammas)
        for i, row in enumerate(levi):
            for j, blk in enumerate(row):
                if len(blk) != 2:
                    continue
                moved = mat_mul(F7, mat_mul(F7, P, blk), inverse(F7, P))
                if moved == blk:
                    continue
                blocks = [list(r) for r in levi]
                blocks[i][j] = moved
                M = make_monodromy(F7, gammas, blocks)
                assert in_betti_locus(point, M)
                assert not in_betti_locus(point, M, strict=True)
                return
    pytest.fail("no non-central 2x2 Levi block in the sample")


def test_json_round_trip_and_errors():
    point, gammas = _worked()
    M = make_monodromy(QQ, gammas, [[ONE, ONE], [ONE, ONE], [identity(QQ, 2)]])
    gam, blk = dump_monodromy(QQ, point.punctures, M)
    assert load_monodromy(QQ, point.punctures, gam, blk) == M
    with pytest.raises(MalformedInput):
        load_monodromy(QQ, point.punctures, gam, {"x1": blk["x1"]})
    with pytest.raises(DimensionMismatch):
        make_monodromy(QQ, gammas, [[ONE], [ONE, ONE], [identity(QQ, 2)]])
    with pytest.raises(PreconditionError):
        make_monodromy(QQ, [(0,)], [[((0,),)]])
