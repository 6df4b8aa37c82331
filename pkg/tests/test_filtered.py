from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from filtloc.errors import MalformedInput, PreconditionError
from filtloc.field import QQ, PrimeField
from filtloc.filtered import (
    SEMISTABLE,
    STABLE,
    UNSTABLE,
    WeightedFlag,
    degree,
    degree_zero_simplified_stability,
    dump_fls,
    gr,
    induced_quotient,
    induced_sub,
    isomorphic,
    jordan_holder,
    load_fls,
    make_fls,
    s_equivalent,
    slope_stability,
    sub_degree,
    transport,
)
from filtloc.invariant import maximal_chain
from filtloc.linalg import Subspace, enumerate_subspaces
from filtloc.sampling import degree_zero_weights, worked_example, random_invertible, random_subspace, sample_fls
from filtloc.surface import invariant_lattice, make_rep

F5 = PrimeField(5)
LINE = Subspace.span(QQ, 2, [(1, 0)])


def test_worked_example_numbers():
    fls = worked_example()
    assert degree(fls) == 0
    sub = induced_sub(fls, LINE)
    assert [wf.weights for wf in sub.flags] == [(Fraction(-1, 3),), (Fraction(-1, 3),), (Fraction(0),)]
    assert degree(sub) == sub_degree(fls, LINE) == Fraction(-2, 3)
    assert slope_stability(fls).cls == STABLE
    assert degree_zero_simplified_stability(fls).cls == STABLE


def test_degree_examples():
    F = QQ
    one = make_rep(F, 0, ["x"], 2, C={"x": [[1, 0], [0, 1]]})
    fls = make_fls(one, [WeightedFlag.standard(F, (1, 1), (Fraction(2, 5), Fraction(-1, 7)))])
    assert degree(fls) == Fraction(9, 35)
    assert degree(make_fls(one, [WeightedFlag.trivial(F, 2)])) == 0


def test_identity_rep_trivial_weights_is_strictly_semistable():
    rep = make_rep(QQ, 0, ["x"], 2, C={"x": [[1, 0], [0, 1]]})
    fls = make_fls(rep, [WeightedFlag.trivial(QQ, 2)])
    assert slope_stability(fls).cls == SEMISTABLE
    assert degree_zero_simplified_stability(fls).cls == SEMISTABLE


def test_induced_sub_of_whole_space_is_itself():
    fls = worked_example()
    assert induced_sub(fls, Subspace.full(QQ, 2)) == fls


def test_flag_must_be_preserved():
    rep = make_rep(QQ, 0, ["x1", "x2"], 2, C=[[[1, 0], [1, 1]], [[1, 0], [-1, 1]]])
    with pytest.raises(PreconditionError):
        make_fls(rep, [WeightedFlag.standard(QQ, (1, 1), (1, 0))] * 2)


def test_weights_must_be_distinct():
    with pytest.raises(PreconditionError):
        WeightedFlag.standard(QQ, (1, 1), (0, 0))


def _sample(seed: int, F=F5, n=2):
    rng = random.Random(seed)
    types = {"x": (1,) * n, "y": (1,) * n, "z": (n,)}
    ws = degree_zero_weights(types, rng)
    W = random_subspace(F, n, 1, rng) if seed % 3 else None
    return sample_fls(F, 0, list(types), n, types, ws, rng, preserve=W)


def _degree_by_largest_index(fls, W):
    # weight of each basis vector of W = weight of the deepest step still containing it
    total = Fraction(0)
    for wf in fls.flags:
        steps = wf.flag.steps
        inter = [W & L for L in steps]
        for i in range(len(steps) - 1):
            total += wf.weights[i] * (inter[i].dim - inter[i + 1].dim)
    return total


@given(st.integers(0, 10**6))
def test_sub_degree_two_ways(seed):
    fls = _sample(seed)
    for W in invariant_lattice(fls.rep).proper():
        assert degree(induced_sub(fls, W)) == sub_degree(fls, W) == _degree_by_largest_index(fls, W)


@given(st.integers(0, 10**6))
def test_sub_plus_quotient_degree(seed):
    fls = _sample(seed)
    for W in invariant_lattice(fls.rep).proper():
        assert degree(induced_sub(fls, W)) + degree(induced_quotient(fls, W)) == degree(fls)


def _slope_scan(fls):
    """Oracle: every subspace of F_p^n, invariant or not filtered by hand."""
    F, n = fls.field, fls.n
    mu = degree(fls) / n
    worst = None
    for W in enumerate_subspaces(F, n):
        if 0 < W.dim < n and all(W.is_invariant(g) for g in fls.rep.generators()):
            s = sub_degree(fls, W) / W.dim
            worst = s if worst is None else max(worst, s)
    if worst is None or worst < mu:
        return STABLE
    return SEMISTABLE if worst == mu else UNSTABLE


@given(st.integers(0, 10**6))
def test_slope_matches_subspace_scan(seed):
    fls = _sample(seed, PrimeField(3), 3)
    assert slope_stability(fls).cls == _slope_scan(fls)


@given(st.integers(0, 10**6))
def test_degree_zero_sign_test(seed):
    fls = _sample(seed)
    assert degree(fls) == 0
    assert degree_zero_simplified_stability(fls).cls == slope_stability(fls).cls


@given(st.integers(0, 10**6))
def test_degree_and_verdict_invariant_under_transport(seed):
    fls = _sample(seed)
    g = random_invertible(F5, 2, random.Random(seed))
    moved = transport(fls, g)
    assert degree(moved) == degree(fls)
    assert slope_stability(moved).cls == slope_stability(fls).cls
    assert isomorphic(fls, moved)


def _line_system(F, a, b, order=(0, 1)):
    """Diagonal genus-zero system with two punctures; eigenlines carry opposite weights."""
    c1 = [[a, 0], [0, b]]
    c2 = [[F.inv(a), 0], [0, F.inv(b)]]
    rep = make_rep(F, 0, ["x1", "x2"], 2, C={"x1": c1, "x2": c2})
    wf = WeightedFlag.standard(F, (1, 1), (Fraction(1, 3), Fraction(-1, 3)))
    wf2 = WeightedFlag.standard(F, (1, 1), (Fraction(-1, 3), Fraction(1, 3)))
    return make_fls(rep, [wf, wf2])


def test_jordan_holder_split_case():
    fls = _line_system(F5, 2, 3)
    assert slope_stability(fls).cls == SEMISTABLE
    jh = jordan_holder(fls)
    assert len(jh.factors) == 2
    assert [f.n for f in jh.gr()] == [1, 1]
    # gr does not depend on which degree-zero line starts the filtration
    swap = transport(fls, ((0, 1), (1, 0)))
    assert s_equivalent(fls, swap)


def test_jordan_holder_all_filtrations_agree():
    fls = _line_system(F5, 2, 3)
    lat = invariant_lattice(fls.rep)
    zero_lines = [W for W in lat.proper() if sub_degree(fls, W) == 0]
    assert len(zero_lines) == 2
    grs = []
    for W in zero_lines:
        grs.append(sorted((induced_sub(fls, W).rep.C, induced_quotient(fls, W).rep.C)))
    assert grs[0] == grs[1]


def test_stable_jordan_holder_is_itself():
    fls = worked_example()
    assert jordan_holder(fls).factors == (fls,)
    assert gr(fls) == (fls,)


def test_worked_example_vs_split_system():
    fls = worked_example()
    split = make_fls(
        make_rep(QQ, 0, ["x1", "x2", "x3"], 2, C={"x1": [[1, 0], [0, 1]], "x2": [[1, 0], [0, 1]], "x3": [[1, 0], [0, 1]]}),
        list(fls.flags),
    )
    assert not isomorphic(fls, split)
    # the split system has the line span(e2) of degree 2/3, so S-equivalence is not defined
    assert slope_stability(split).cls == UNSTABLE
    with pytest.raises(PreconditionError):
        s_equivalent(fls, split)


def test_s_equivalence_needs_semistable_degree_zero():
    rep = make_rep(QQ, 0, ["x"], 2, C={"x": [[1, 0], [0, 1]]})
    fls = make_fls(rep, [WeightedFlag.standard(QQ, (1, 1), (1, 0))])
    with pytest.raises(PreconditionError):
        s_equivalent(fls, fls)


@given(st.integers(0, 10**6))
def test_json_round_trip(seed):
    fls = _sample(seed)
    assert load_fls(dump_fls(fls)) == fls


def test_load_rejects_missing_flags():
    obj = dump_fls(worked_example())
    del obj["flags"]["x2"]
    with pytest.raises(MalformedInput):
        load_fls(obj)


def test_maximal_chain_is_a_chain():
    fls = _line_system(F5, 2, 3)
    lat = invariant_lattice(fls.rep)
    chain = maximal_chain(lat.subspaces, 2)
    assert all(a < b or b < a for a, b in itertools.combinations(chain, 2))
