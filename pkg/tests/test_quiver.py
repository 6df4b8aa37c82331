from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from filtloc.errors import PreconditionError
from filtloc.experiments import _extension_rep, point_lifts
from filtloc.field import QQ, PrimeField
from filtloc.filtered import SEMISTABLE, STABLE, UNSTABLE, WeightedFlag, make_fls, slope_stability
from filtloc.flags import Flag, GradedCocharacter, ParabolicGL, parabolic_membership
from filtloc.linalg import Subspace, general_linear_group, identity, inverse, mat_mul
from filtloc.quiver import (
    LEVI_GAUGE,
    GaugeElement,
    QuiverCocharacter,
    QuiverType,
    adapted_lift,
    chi_theta,
    dump_point,
    evaluate_chi,
    gauge_act,
    git_equivalent,
    in_arrow,
    king_check,
    limit_exists,
    load_point,
    make_point,
    membership_in_type,
    orbit_dimension,
    out_arrow,
    pairing,
    pairing_via_degree_formula,
    point_to_fls,
    point_to_rep,
    rep_to_point,
)
from filtloc.sampling import degree_zero_weights, worked_example, random_gauge, random_invertible, sample_fls
from filtloc.surface import conjugate_rep, make_rep

F3, F5 = PrimeField(3), PrimeField(5)
V2 = Subspace.full(QQ, 2)
LINE = Subspace.span(QQ, 2, [(1, 0)])


def test_canonical_lift_of_worked_example():
    fls = worked_example()
    point, typ = rep_to_point(fls)
    for x, c in zip(fls.punctures, fls.rep.C):
        assert point[in_arrow(x)] == identity(QQ, 2)
        assert point[out_arrow(x)] == c
    assert all(w == identity(QQ, 2) for w in membership_in_type(point, typ).values())
    assert point_to_rep(point) == fls.rep
    assert point_to_fls(point, typ) == fls


def test_chi_theta_of_worked_example():
    chi = chi_theta(rep_to_point(worked_example())[1])
    assert chi.d == 3
    assert chi.dx == ((1, -1), (1, -1), (0,))
    assert chi.exponents[0] == (-1, 1)


def test_chi_trivial_for_zero_weights():
    typ = QuiverType.make(QQ, 2, {"x": ((1, 1), (0, 1)), "y": ((2,), (0,))})
    assert not chi_theta(typ).is_trivial()
    assert chi_theta(QuiverType.make(QQ, 2, {"x": ((2,), (0,))})).is_trivial()


@given(st.integers(0, 10**6))
def test_chi_on_scalars(seed):
    rng = random.Random(seed)
    types = {"x": (1, 1), "y": (1, 1)}
    ws = {x: [Fraction(w, 6) for w in rng.sample(range(-6, 7), 2)] for x in types}
    typ = QuiverType.make(F5, 2, {x: (types[x], ws[x]) for x in types})
    chi = chi_theta(typ)
    z = rng.randint(1, 4)
    scal = ((z, 0), (0, z))
    val = evaluate_chi(F5, chi, GaugeElement(scal, (scal, scal)))
    deg = sum(sum(w) for w in ws.values()) * chi.d
    assert val == pow(z, int(-deg) % 4, 5)


def test_membership_matches_fiber_product_brute_force():
    G = list(general_linear_group(F3, 2))
    P = ParabolicGL(Flag.standard(F3, (1, 1)))
    typ = QuiverType.make(F3, 2, {"x1": ((1, 1), (1, 0)), "x2": ((2,), (0,))})
    for gin in G[::3]:
        for gout in G[::2]:
            c = mat_mul(F3, gout, gin)
            arrows = {
                in_arrow("x1"): gin,
                out_arrow("x1"): gout,
                in_arrow("x2"): identity(F3, 2),
                out_arrow("x2"): inverse(F3, c),
            }
            point = make_point(F3, 2, 0, ["x1", "x2"], arrows)
            brute = any(
                parabolic_membership(P, mat_mul(F3, gin, inverse(F3, g)))
                and mat_mul(F3, gin, inverse(F3, g)) in {((a, 0), (0, b)) for a in (1, 2) for b in (1, 2)}
                and parabolic_membership(P, mat_mul(F3, g, gout))
                for g in G
            )
            assert (membership_in_type(point, typ) is not None) == brute


def test_swap_in_arrow_has_no_witness():
    swap = ((0, 1), (1, 0))
    arrows = {in_arrow("x"): swap, out_arrow("x"): swap}
    point = make_point(QQ, 2, 0, ["x"], arrows)
    typ = QuiverType.make(QQ, 2, {"x": ((1, 1), (1, 0))})
    assert membership_in_type(point, typ) is not None  # swap * swap = 1
    arrows = {in_arrow("x"): swap, out_arrow("x"): identity(QQ, 2)}
    with pytest.raises(PreconditionError):
        make_point(QQ, 2, 0, ["x"], arrows)


@given(st.integers(0, 10**6))
def test_gauge_action_conjugates_the_rep(seed):
    rng = random.Random(seed)
    fls = worked_example(F5)
    point, typ = rep_to_point(fls)
    g = random_gauge(F5, 2, [wf.partition for wf in fls.flags], rng)
    moved = gauge_act(point, g)
    assert point_to_rep(moved) == conjugate_rep(fls.rep, g.g0)
    assert membership_in_type(moved, typ) is not None


def test_worked_example_pairing_both_ways():
    fls = worked_example()
    lift, mu = adapted_lift(fls, [V2, LINE], [0, 1])
    assert lift == rep_to_point(fls)[0]
    chi = chi_theta(QuiverType.of(fls))
    assert pairing(mu, chi) == 2
    assert pairing_via_degree_formula(mu.mu0, fls, chi.d) == 2
    assert limit_exists(mu, lift)[0]
    assert pairing(mu.scaled(3), chi) == 6


def test_trivial_and_central_cocharacters():
    fls = worked_example()
    point, typ = rep_to_point(fls)
    chi = chi_theta(typ)
    triv = GradedCocharacter.trivial(QQ, 2)
    mu = QuiverCocharacter(triv, (triv,) * 3)
    ok, lim = limit_exists(mu, point)
    assert ok and lim == point
    assert pairing(mu, chi) == 0
    central = GradedCocharacter(QQ, (2,), (2,), identity(QQ, 2))
    assert pairing(QuiverCocharacter(central, (central,) * 3), chi) == 0
    assert pairing_via_degree_formula(central, fls, chi.d) == 0


def test_opposite_flag_has_no_limit():
    fls = worked_example()
    point, _ = rep_to_point(fls)
    # weight 1 on e2 instead of e1: the corner of [[1, 1], [0, 1]] blows up
    opp = GradedCocharacter.from_columns(QQ, identity(QQ, 2), [0, 1])
    assert not limit_exists(QuiverCocharacter(opp, (opp,) * 3), point)[0]


def test_king_examples():
    point, typ = rep_to_point(worked_example())
    assert king_check(point, typ).cls == STABLE
    rep = make_rep(F5, 1, ["x"], 2, [((1, 1), (0, 1))], [((2, 0), (0, 3))], {"x": identity(F5, 2)}, check=False)
    from filtloc.surface import commutator

    rep = make_rep(F5, 1, ["x"], 2, rep.A, rep.B, {"x": inverse(F5, commutator(F5, rep.A[0], rep.B[0]))})
    fls = make_fls(rep, [WeightedFlag.trivial(F5, 2)])
    p, t = rep_to_point(fls)
    assert king_check(p, t).semistable


def _sample(seed, n=2, genus=0):
    rng = random.Random(seed)
    types = {"x": (1,) * n, "y": (1,) * n}
    ws = degree_zero_weights(types, rng)
    return sample_fls(F5, genus, list(types), n, types, ws, rng)


@given(st.integers(0, 10**6))
def test_king_matches_slope_on_every_lift(seed):
    fls = _sample(seed)
    want = slope_stability(fls).cls
    typ = QuiverType.of(fls)
    for p in point_lifts(fls):
        assert king_check(p, typ).cls == want


@given(st.integers(0, 10**6))
def test_point_json_round_trip(seed):
    point, _ = rep_to_point(_sample(seed))
    assert load_point(dump_point(point)) == point


def test_orbit_dimension_of_worked_example():
    point, typ = rep_to_point(worked_example())
    assert orbit_dimension(point, typ) == 11


def test_eigenline_off_the_standard_flags():
    # the destabilizing line (1, 1) meets neither flag, so its adapted point is a U-variant
    C = ((1, 1), (0, 2))
    rep = make_rep(F5, 0, ["x1", "x2"], 2, C={"x1": C, "x2": inverse(F5, C)})
    t = Fraction(1, 3)
    fls = make_fls(rep, [WeightedFlag.standard(F5, (1, 1), (t, -t))] * 2)
    point, typ = rep_to_point(fls)
    verdict = king_check(point, typ)
    assert verdict.cls == UNSTABLE and verdict.witness_degree == Fraction(2, 3)
    W = Subspace.span(F5, 2, [(1, 1)])
    lift, mu = adapted_lift(fls, [Subspace.full(F5, 2), W], [0, 1])
    assert lift != point
    assert point_to_fls(lift, typ) == fls
    assert pairing(mu, chi_theta(typ)) == -2


def test_git_equivalence_of_split_and_nonsplit_extensions():
    triv = [WeightedFlag.trivial(F5, 2)]
    nonsplit = make_fls(_extension_rep(F5, (2, 3), (1, 4), 1, 0), triv)
    split = make_fls(_extension_rep(F5, (2, 3), (1, 4), 0, 0), triv)
    other = make_fls(_extension_rep(F5, (2, 2), (1, 4), 1, 0), triv)
    p1, typ = rep_to_point(nonsplit)
    p2, _ = rep_to_point(split)
    p3, _ = rep_to_point(other)
    assert king_check(p1, typ).cls == SEMISTABLE
    assert git_equivalent(p1, p2, typ)
    assert not git_equivalent(p1, p3, typ)


def test_gauge_orbit_is_git_equivalent():
    rng = random.Random(3)
    fls = worked_example(F5)
    point, typ = rep_to_point(fls)
    g = random_gauge(F5, 2, [wf.partition for wf in fls.flags], rng)
    assert git_equivalent(point, gauge_act(point, g), typ)


def test_levi_gauge_misses_the_unipotent_fiber():
    fls = worked_example(F5)
    point, typ = rep_to_point(fls)
    u = ((1, 1), (0, 1))
    arrows = dict(point.arrows)
    arrows[in_arrow("x1")] = u
    arrows[out_arrow("x1")] = mat_mul(F5, fls.rep.C[0], inverse(F5, u))
    variant = make_point(F5, 2, 0, fls.punctures, arrows)
    assert point_to_fls(variant, typ) == fls
    assert git_equivalent(point, variant, typ)
    assert not git_equivalent(point, variant, typ, gauge=LEVI_GAUGE)


def test_unstable_point_has_no_git_class():
    C = ((1, 1), (0, 2))
    rep = make_rep(F5, 0, ["x1", "x2"], 2, C={"x1": C, "x2": inverse(F5, C)})
    t = Fraction(1, 3)
    fls = make_fls(rep, [WeightedFlag.standard(F5, (1, 1), (t, -t))] * 2)
    point, typ = rep_to_point(fls)
    with pytest.raises(PreconditionError):
        git_equivalent(point, point, typ)


def test_random_invertible_is_invertible():
    M = random_invertible(F5, 3, random.Random(0))
    assert mat_mul(F5, M, inverse(F5, M)) == identity(F5, 3)
