from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from filtloc.canonical import are_conjugate, char_poly, rational_canonical_form
from filtloc.errors import MalformedInput, SingularMatrix
from filtloc.field import QQ, PrimeField, field_from_name
from filtloc.invariant import enumerate_invariant_subspaces
from filtloc.linalg import (
    Subspace,
    count_subspaces,
    det,
    enumerate_subspaces,
    general_linear_group,
    identity,
    inverse,
    is_invertible,
    kernel,
    load_matrix,
    mat_mul,
    mat_vec,
    rank,
)

F3, F5 = PrimeField(3), PrimeField(5)


def small_matrices(F, n):
    if F.is_finite():
        entry = st.integers(0, F.p - 1)
    else:
        entry = st.fractions(min_value=-4, max_value=4, max_denominator=3)
    return st.lists(st.lists(entry, min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: tuple(tuple(F(x) for x in r) for r in rows)
    )


@pytest.mark.parametrize("name,expected", [("Q", QQ), ("F5", F5), ("F7", PrimeField(7))])
def test_field_names(name, expected):
    assert field_from_name(name) == expected


def test_bad_field_name():
    with pytest.raises(MalformedInput):
        field_from_name("R")


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError):
        PrimeField(6)


def test_fraction_into_prime_field():
    assert F5(Fraction(1, 3)) == 2
    with pytest.raises(ZeroDivisionError):
        F5(Fraction(1, 5))


@given(small_matrices(QQ, 3))
def test_inverse_over_q(M):
    if det(QQ, M) == 0:
        with pytest.raises(SingularMatrix):
            inverse(QQ, M)
    else:
        assert mat_mul(QQ, M, inverse(QQ, M)) == identity(QQ, 3)


@given(small_matrices(F5, 3))
def test_rank_nullity(M):
    ker = kernel(F5, M)
    assert rank(F5, M) + len(ker) == 3
    for v in ker:
        assert mat_vec(F5, M, v) == (0, 0, 0)


@given(small_matrices(F5, 3))
def test_det_zero_iff_singular(M):
    assert (det(F5, M) != 0) == is_invertible(F5, M)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (3, 3), (5, 2)])
def test_subspace_count(p, n):
    F = PrimeField(p)
    subs = list(enumerate_subspaces(F, n))
    assert len(subs) == len(set(subs)) == count_subspaces(p, n)


def _members(S: Subspace):
    F = S.field
    return {v for v in itertools.product(range(F.p), repeat=S.n) if S.contains_vector(v)}


def test_meet_and_join_against_point_sets():
    subs = list(enumerate_subspaces(F3, 3))
    for A, B in itertools.islice(itertools.product(subs, subs), 0, None, 7):
        assert _members(A & B) == _members(A) & _members(B)
        assert _members(A + B) >= _members(A) | _members(B)
        assert (A + B).dim == A.dim + B.dim - (A & B).dim


def test_gl_orders():
    assert sum(1 for _ in general_linear_group(F3, 2)) == 48
    assert sum(1 for _ in general_linear_group(PrimeField(2), 3)) == 168


def test_load_matrix_rejects_ragged():
    with pytest.raises(MalformedInput):
        load_matrix(QQ, [[1, 2], [3]])


def test_conjugacy_matches_brute_force_gl2_f3():
    G = list(general_linear_group(F3, 2))
    mats = [tuple(tuple(r) for r in M) for M in itertools.product(itertools.product(range(3), repeat=2), repeat=2)]
    classes = {}
    for M in mats:
        orbit = frozenset(mat_mul(F3, mat_mul(F3, g, M), inverse(F3, g)) for g in G)
        classes[M] = orbit
    sample = mats[::5]
    for A in sample:
        for B in sample:
            assert are_conjugate(F3, A, B) == (B in classes[A])


@given(small_matrices(F5, 3))
def test_rational_canonical_form_is_conjugate_with_same_charpoly(M):
    R = rational_canonical_form(F5, M)
    assert char_poly(F5, R) == char_poly(F5, M)
    assert rational_canonical_form(F5, R) == R


def test_invariant_subspaces_brute_force_f3():
    gens = [((1, 1, 0), (0, 1, 0), (0, 0, 2))]
    lat = enumerate_invariant_subspaces(F3, 3, gens)
    brute = [S for S in enumerate_subspaces(F3, 3) if all(S.is_invariant(g) for g in gens)]
    assert set(lat.subspaces) == set(brute)
    assert lat.complete


def test_spin_backend_finds_lines_over_q():
    gens = [((Fraction(1), Fraction(1)), (Fraction(0), Fraction(1)))]
    lat = enumerate_invariant_subspaces(QQ, 2, gens)
    assert Subspace.span(QQ, 2, [(1, 0)]) in lat
    assert len(lat.proper()) == 1
    assert lat.complete
