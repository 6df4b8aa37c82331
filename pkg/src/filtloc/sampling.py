"""Seeded instance generation and the fixed worked example.

Generators are drawn at random except the monodromy of the last puncture,
which is solved from the relation. Flags are drawn among the invariant flags
of each local monodromy.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import PreconditionError
from .field import QQ, Field
from .filtered import FilteredLocalSystem, WeightedFlag, make_fls
from .flags import Flag
from .invariant import enumerate_invariant_subspaces
from .linalg import (
    Matrix,
    Subspace,
    common_adapted_basis,
    identity,
    inverse,
    is_invertible,
    mat_mul,
)
from .quiver import GaugeElement
from .surface import commutator, make_rep


def worked_example(F: Field = QQ) -> FilteredLocalSystem:
    """Genus 0, three punctures, unipotent monodromy at x1 and x2, weights +-1/3 there."""
    rep = make_rep(
        F,
        0,
        ["x1", "x2", "x3"],
        2,
        C={"x1": [[1, 1], [0, 1]], "x2": [[1, -1], [0, 1]], "x3": [[1, 0], [0, 1]]},
    )
    t = Fraction(1, 3)
    full = WeightedFlag.standard(F, (1, 1), (t, -t))
    return make_fls(rep, [full, full, WeightedFlag.trivial(F, 2)])


def random_matrix(F: Field, n: int, rng: random.Random) -> Matrix:
    return tuple(tuple(F.random(rng) for _ in range(n)) for _ in range(n))


def random_invertible(F: Field, n: int, rng: random.Random) -> Matrix:
    while True:
        M = random_matrix(F, n, rng)
        if is_invertible(F, M):
            return M


def random_stabilizing(F: Field, n: int, chains: Sequence[Sequence[Subspace]], rng: random.Random) -> Matrix:
    """Random invertible element preserving every step of up to two decreasing chains."""
    chains = [list(c) for c in chains]
    while len(chains) < 2:
        chains.append([Subspace.full(F, n)])
    basis = common_adapted_basis(F, n, chains[0], chains[1])
    vecs = [v for v, _, _ in basis]
    while True:
        X = tuple(
            tuple(
                F.random(rng) if (basis[r][1] >= basis[c][1] and basis[r][2] >= basis[c][2]) else F.zero
                for c in range(n)
            )
            for r in range(n)
        )
        if is_invertible(F, X):
            P = tuple(zip(*vecs))
            return mat_mul(F, mat_mul(F, P, X), inverse(F, P))


def random_levi_element(F: Field, partition: Sequence[int], rng: random.Random) -> Matrix:
    n = sum(partition)
    M = [[F.zero] * n for _ in range(n)]
    top = n
    for lam in partition:
        blk = random_invertible(F, lam, rng)
        for r in range(lam):
            for c in range(lam):
                M[top - lam + r][top - lam + c] = blk[r][c]
        top -= lam
    return tuple(tuple(r) for r in M)


def random_gauge(F: Field, n: int, partitions: Sequence[Sequence[int]], rng: random.Random) -> GaugeElement:
    return GaugeElement(random_invertible(F, n, rng), tuple(random_levi_element(F, p, rng) for p in partitions))


def random_flag(F: Field, partition: Sequence[int], rng: random.Random) -> Flag:
    n = sum(partition)
    return Flag.standard(F, partition).image(random_invertible(F, n, rng))


def invariant_flags(F: Field, n: int, gens: Sequence[Matrix], partition: Sequence[int]) -> list[Flag]:
    """Flags of the given type made of common invariant subspaces (as far as the lattice knows)."""
    lat = enumerate_invariant_subspaces(F, n, tuple(gens))
    dims, top = [], n
    for lam in partition[:-1]:
        top -= lam
        dims.append(top)
    out: list[Flag] = []

    def grow(chain, k):
        if k == len(dims):
            out.append(Flag.from_subspaces(F, n, chain))
            return
        for W in lat.subspaces:
            if W.dim == dims[k] and (not chain or W < chain[-1]):
                grow(chain + [W], k + 1)

    grow([], 0)
    return out


def degree_zero_weights(types: Mapping[str, Sequence[int]], rng: random.Random, den: int = 6) -> dict:
    """Distinct random weights per puncture, shifted at the last puncture to total degree zero."""
    xs = list(types)
    out = {}
    for x in xs:
        k = len(types[x])
        ws = rng.sample(range(-2 * den, 2 * den + 1), k)
        out[x] = [Fraction(w, den) for w in ws]
    n = sum(types[xs[-1]])
    deg = sum(w * lam for x in xs for w, lam in zip(out[x], types[x]))
    out[xs[-1]] = [w - deg / n for w in out[xs[-1]]]
    return out


def sample_fls(
    F: Field,
    genus: int,
    punctures: Sequence[str],
    n: int,
    partitions: Mapping[str, Sequence[int]],
    weights: Mapping[str, Sequence],
    rng: random.Random,
    preserve: Subspace | None = None,
    tries: int = 200,
) -> FilteredLocalSystem:
    """Random filtered system; ``preserve`` forces a common invariant subspace.

    The last puncture's monodromy is solved from the relation and its flag is
    a random invariant flag of the requested type; a draw without one is
    rejected.
    """
    xs = list(punctures)
    if not xs and genus == 0:
        raise PreconditionError("need a puncture or positive genus")
    base = [preserve] if preserve is not None else []
    base_chain = [Subspace.full(F, n)] + base
    for _ in range(tries):
        A = [random_stabilizing(F, n, [base_chain], rng) for _ in range(genus)]
        B = [random_stabilizing(F, n, [base_chain], rng) for _ in range(genus)]
        C, flags = {}, {}
        for x in xs[:-1]:
            fl = random_flag(F, partitions[x], rng)
            C[x] = random_stabilizing(F, n, [base_chain, list(fl.steps[:-1])], rng)
            flags[x] = fl
        prod = identity(F, n)
        for a, b in zip(A, B):
            prod = mat_mul(F, prod, commutator(F, a, b))
        for x in xs[:-1]:
            prod = mat_mul(F, prod, C[x])
        if xs:
            last = xs[-1]
            C[last] = inverse(F, prod)
            cands = invariant_flags(F, n, [C[last]], partitions[last])
            if not cands:
                continue
            flags[last] = rng.choice(cands)
        elif prod != identity(F, n):
            continue
        rep = make_rep(F, genus, xs, n, A, B, C)
        wfs = [WeightedFlag(flags[x], tuple(Fraction(w) for w in weights[x])) for x in xs]
        return make_fls(rep, wfs)
    raise PreconditionError("could not sample an instance within the retry budget")


def random_subspace(F: Field, n: int, dim: int, rng: random.Random) -> Subspace:
    while True:
        S = Subspace.span(F, n, [tuple(F.random(rng) for _ in range(n)) for _ in range(dim)])
        if S.dim == dim:
            return S
