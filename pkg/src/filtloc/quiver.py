"""The punctured-surface quiver, its gauge group, and King stability of its points.

Vertices are v0 and one v_x per puncture. Arrows a_i, b_i are loops at v0;
``c_{x}_in`` goes v0 -> v_x and ``c_{x}_out`` goes v_x -> v0, and the loop
c_x is out * in. A point assigns an invertible matrix to every arrow and
satisfies prod [a_i, b_i] * prod c_x = 1.

The type of a point is one standard weighted flag per puncture. P_x is its
stabilizer (block upper triangular) and L_x the block-diagonal Levi. A point
lies over the type when in * out is in P_x; then g_x = in is a witness of the
fiber-product condition and the flag it induces on v0 is in^{-1}(standard).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import BudgetExceeded, DimensionMismatch, IncompleteCertificate, MalformedInput, PreconditionError
from .field import Field
from .filtered import (
    SEMISTABLE,
    STABLE,
    UNSTABLE,
    FilteredLocalSystem,
    StabilityVerdict,
    WeightedFlag,
    degree,
    make_fls,
    sub_degree,
)
from .flags import Flag, GradedCocharacter, ParabolicGL, cochar_limit, cochar_to_flag, levi_membership, parabolic_membership
from .invariant import hom_space
from .linalg import (
    Matrix,
    Subspace,
    common_adapted_basis,
    det,
    dump_matrix,
    identity,
    inverse,
    is_invertible,
    load_matrix,
    mat_mul,
)
from .surface import SurfaceRep, _field_from_any, commutator, make_rep


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple  # (name, source, target)

    def __post_init__(self):
        vs = set(self.vertices)
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise PreconditionError("arrow names must be distinct")
        for _, s, t in self.arrows:
            if s not in vs or t not in vs:
                raise PreconditionError("arrow endpoints must be vertices")
        if not self.is_connected():
            raise PreconditionError("quiver must be connected")

    def source(self, a: str):
        return self._arrow(a)[1]

    def target(self, a: str):
        return self._arrow(a)[2]

    def _arrow(self, a: str):
        for arr in self.arrows:
            if arr[0] == a:
                return arr
        raise KeyError(a)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen, todo = {self.vertices[0]}, [self.vertices[0]]
        while todo:
            v = todo.pop()
            for _, s, t in self.arrows:
                for u, w in ((s, t), (t, s)):
                    if u == v and w not in seen:
                        seen.add(w)
                        todo.append(w)
        return seen == set(self.vertices)


def in_arrow(x: str) -> str:
    return f"c_{x}_in"


def out_arrow(x: str) -> str:
    return f"c_{x}_out"


@dataclass(frozen=True)
class PuncturedQuiver:
    genus: int
    punctures: tuple
    quiver: Quiver

    def relation(self) -> tuple:
        """The relation as a word in arrows, applied right to left; it must equal the identity at v0."""
        word = []
        for i in range(1, self.genus + 1):
            word += [f"a{i}", f"b{i}", f"a{i}^-1", f"b{i}^-1"]
        for x in self.punctures:
            word += [out_arrow(x), in_arrow(x)]
        return tuple(word)


def build_punctured_quiver(genus: int, punctures: Sequence[str]) -> PuncturedQuiver:
    if genus < 0:
        raise PreconditionError("genus must be non-negative")
    D = tuple(punctures)
    if len(set(D)) != len(D):
        raise PreconditionError("puncture labels must be distinct")
    verts = ("v0",) + tuple(f"v_{x}" for x in D)
    arrows = [(f"a{i}", "v0", "v0") for i in range(1, genus + 1)]
    arrows += [(f"b{i}", "v0", "v0") for i in range(1, genus + 1)]
    for x in D:
        arrows += [(in_arrow(x), "v0", f"v_{x}"), (out_arrow(x), f"v_{x}", "v0")]
    return PuncturedQuiver(genus, D, Quiver(verts, tuple(arrows)))


@dataclass(frozen=True)
class QuiverType:
    """Standard weighted flag per puncture; fixes P_x, L_x and the weights."""

    field: Field
    n: int
    punctures: tuple
    flags: tuple  # WeightedFlag on a standard flag, per puncture

    def __post_init__(self):
        if len(self.flags) != len(self.punctures):
            raise PreconditionError("need one weighted flag per puncture")
        for wf in self.flags:
            if wf.flag.n != self.n or wf.flag != Flag.standard(self.field, wf.partition):
                raise PreconditionError("type flags must be standard flags of the right size")

    def parabolic(self, x: str) -> ParabolicGL:
        return ParabolicGL(self.flag_at(x).flag)

    def flag_at(self, x: str) -> WeightedFlag:
        return self.flags[self.punctures.index(x)]

    @staticmethod
    def of(fls: FilteredLocalSystem) -> "QuiverType":
        F = fls.field
        flags = tuple(WeightedFlag.standard(F, wf.partition, wf.weights) for wf in fls.flags)
        return QuiverType(F, fls.n, fls.punctures, flags)

    @staticmethod
    def make(F: Field, n: int, data: Mapping[str, tuple]) -> "QuiverType":
        """data maps puncture -> (partition, weights), top piece first."""
        xs = tuple(data)
        flags = tuple(WeightedFlag.standard(F, data[x][0], data[x][1]) for x in xs)
        if any(sum(wf.partition) != n for wf in flags):
            raise DimensionMismatch("partitions must sum to the rank")
        return QuiverType(F, n, xs, flags)

    def dump(self) -> dict:
        return {
            x: {"partition": list(wf.partition), "weights": [_q(w) for w in wf.weights]}
            for x, wf in zip(self.punctures, self.flags)
        }


def load_type(F: Field, n: int, obj) -> QuiverType:
    try:
        data = {x: (tuple(v["partition"]), tuple(Fraction(str(w)) for w in v["weights"])) for x, v in obj.items()}
    except (KeyError, TypeError, ValueError, AttributeError, ZeroDivisionError) as exc:
        raise MalformedInput("type JSON maps each puncture to partition and weights") from exc
    try:
        return QuiverType.make(F, n, data)
    except PreconditionError as exc:
        raise MalformedInput(str(exc)) from exc


def _q(w) -> str:
    w = Fraction(w)
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


@dataclass(frozen=True)
class QuiverPoint:
    field: Field
    n: int
    genus: int
    punctures: tuple
    arrows: tuple  # ((name, matrix), ...) in canonical arrow order

    def __post_init__(self):
        names = [a for a, _ in self.arrows]
        expected = [a for a, _, _ in build_punctured_quiver(self.genus, self.punctures).quiver.arrows]
        if names != expected:
            raise DimensionMismatch("arrows do not match the punctured quiver")
        for a, M in self.arrows:
            if len(M) != self.n or any(len(r) != self.n for r in M):
                raise DimensionMismatch(f"arrow {a} is not {self.n}x{self.n}")
            if not is_invertible(self.field, M):
                raise PreconditionError(f"arrow {a} is not invertible")
        if not relation_holds(self):
            raise PreconditionError("the relation does not hold")

    def __getitem__(self, a: str) -> Matrix:
        for name, M in self.arrows:
            if name == a:
                return M
        raise KeyError(a)

    def c(self, x: str) -> Matrix:
        return mat_mul(self.field, self[out_arrow(x)], self[in_arrow(x)])


def make_point(F: Field, n: int, genus: int, punctures: Sequence[str], arrows: Mapping[str, Matrix]) -> QuiverPoint:
    Q = build_punctured_quiver(genus, punctures)
    names = [a for a, _, _ in Q.quiver.arrows]
    if set(arrows) != set(names):
        raise DimensionMismatch("arrows do not match the punctured quiver")
    conv = lambda M: tuple(tuple(F(v) for v in row) for row in M)  # noqa: E731
    return QuiverPoint(F, n, genus, tuple(punctures), tuple((a, conv(arrows[a])) for a in names))


def relation_holds(point: QuiverPoint) -> bool:
    F, n = point.field, point.n
    out = identity(F, n)
    for i in range(1, point.genus + 1):
        out = mat_mul(F, out, commutator(F, point[f"a{i}"], point[f"b{i}"]))
    for x in point.punctures:
        out = mat_mul(F, out, point.c(x))
    return out == identity(F, n)


@dataclass(frozen=True)
class GaugeElement:
    """(g_{v0}, g_{v_x} per puncture)."""

    g0: Matrix
    gx: tuple


def gauge_act(point: QuiverPoint, g: GaugeElement) -> QuiverPoint:
    F = point.field
    g0i = inverse(F, g.g0)
    out = {}
    for a, M in point.arrows:
        if a[0] in "ab":
            out[a] = mat_mul(F, mat_mul(F, g.g0, M), g0i)
    for x, h in zip(point.punctures, g.gx):
        out[in_arrow(x)] = mat_mul(F, mat_mul(F, h, point[in_arrow(x)]), g0i)
        out[out_arrow(x)] = mat_mul(F, mat_mul(F, g.g0, point[out_arrow(x)]), inverse(F, h))
    return make_point(F, point.n, point.genus, point.punctures, out)


def in_gauge_group(g: GaugeElement, typ: QuiverType, levi: bool = True) -> bool:
    test = levi_membership if levi else parabolic_membership
    return is_invertible(typ.field, g.g0) and all(test(typ.parabolic(x), h) for x, h in zip(typ.punctures, g.gx))


def flag_standardizer(wf: WeightedFlag) -> Matrix:
    """h with h(L_i) equal to the standard step of the same dimension."""
    return inverse(wf.flag.field, wf.flag.basis_matrix())


def rep_to_point(fls: FilteredLocalSystem) -> tuple[QuiverPoint, QuiverType]:
    F = fls.field
    arrows = {}
    for i, (a, b) in enumerate(zip(fls.rep.A, fls.rep.B), start=1):
        arrows[f"a{i}"], arrows[f"b{i}"] = a, b
    for x, wf, c in zip(fls.punctures, fls.flags, fls.rep.C):
        h = flag_standardizer(wf)
        arrows[in_arrow(x)] = h
        arrows[out_arrow(x)] = mat_mul(F, c, inverse(F, h))
    point = make_point(F, fls.n, fls.rep.genus, fls.punctures, arrows)
    return point, QuiverType.of(fls)


def point_to_rep(point: QuiverPoint) -> SurfaceRep:
    g = point.genus
    A = [point[f"a{i}"] for i in range(1, g + 1)]
    B = [point[f"b{i}"] for i in range(1, g + 1)]
    C = {x: point.c(x) for x in point.punctures}
    return make_rep(point.field, g, point.punctures, point.n, A, B, C)


def membership_in_type(point: QuiverPoint, typ: QuiverType) -> dict | None:
    """Witnesses g_x (in L_x-normalized form g_x = in) or None.

    Exists g with in g^{-1} in L and g out in P  <=>  in * out in P.
    """
    _check_type(point, typ)
    F = point.field
    out = {}
    for x in point.punctures:
        gin, gout = point[in_arrow(x)], point[out_arrow(x)]
        if not parabolic_membership(typ.parabolic(x), mat_mul(F, gin, gout)):
            return None
        out[x] = gin
    return out


def _check_type(point: QuiverPoint, typ: QuiverType):
    if typ.punctures != point.punctures or typ.n != point.n or typ.field != point.field:
        raise DimensionMismatch("type does not match the point")


def point_to_fls(point: QuiverPoint, typ: QuiverType) -> FilteredLocalSystem:
    if membership_in_type(point, typ) is None:
        raise PreconditionError("point does not lie over the type")
    F = point.field
    rep = point_to_rep(point)
    flags = [
        WeightedFlag(wf.flag.image(inverse(F, point[in_arrow(x)])), wf.weights)
        for x, wf in zip(typ.punctures, typ.flags)
    ]
    return make_fls(rep, flags)


# --- characters ------------------------------------------------------------


@dataclass(frozen=True)
class ChiTheta:
    """chi(g) = prod_x prod_i det(block_i(g_x))^{-d_{x,i}}; trivial at v0."""

    d: int
    dx: tuple  # per puncture, one integer per block, top piece first
    partitions: tuple

    @property
    def exponents(self) -> tuple:
        return tuple(tuple(-e for e in row) for row in self.dx)

    def is_trivial(self) -> bool:
        return all(e == 0 for row in self.dx for e in row)

    def theta(self) -> tuple:
        return tuple(tuple(Fraction(e, self.d) for e in row) for row in self.dx)


def chi_theta(typ: QuiverType) -> ChiTheta:
    ws = [Fraction(w) for wf in typ.flags for w in wf.weights]
    d = math.lcm(*(w.denominator for w in ws)) if ws else 1
    dx = tuple(tuple(int(Fraction(w) * d) for w in wf.weights) for wf in typ.flags)
    return ChiTheta(d, dx, tuple(wf.partition for wf in typ.flags))


def _block_indices(partition: Sequence[int]) -> list[list[int]]:
    """Coordinate indices of each piece of the standard flag, top piece first."""
    n = sum(partition)
    out, top = [], n
    for lam in partition:
        out.append(list(range(top - lam, top)))
        top -= lam
    return out


def _power(F: Field, a, k: int):
    if k >= 0:
        out = F.one
        for _ in range(k):
            out = F.mul(out, a)
        return out
    return _power(F, F.inv(a), -k)


def evaluate_chi(F: Field, chi: ChiTheta, g: GaugeElement):
    out = F.one
    for h, row, part in zip(g.gx, chi.dx, chi.partitions):
        for idx, e in zip(_block_indices(part), row):
            blk = tuple(tuple(h[r][c] for c in idx) for r in idx)
            out = F.mul(out, _power(F, det(F, blk), -e))
    return out


# --- cocharacters, limits, pairing -----------------------------------------


@dataclass(frozen=True)
class QuiverCocharacter:
    mu0: GradedCocharacter
    mux: tuple  # per puncture

    def scaled(self, m: int) -> "QuiverCocharacter":
        return QuiverCocharacter(self.mu0.scaled(m), tuple(mu.scaled(m) for mu in self.mux))


def _block_exponents(mu: GradedCocharacter, partition: Sequence[int]) -> list[int]:
    """Exponent of t in det(block_i(mu(t))), or PreconditionError if mu is not in the Levi."""
    F, n = mu.field, mu.n
    cols = list(zip(*mu.basis))
    cw = mu.column_weights()
    blocks = [Subspace.coordinate(F, n, idx) for idx in _block_indices(partition)]
    out = [0] * len(blocks)
    for w in mu.weights:
        E = Subspace.span(F, n, [c for c, cwt in zip(cols, cw) if cwt == w])
        parts = [E & B for B in blocks]
        if sum(p.dim for p in parts) != E.dim:
            raise PreconditionError("cocharacter at a puncture vertex is not in the Levi")
        for i, p in enumerate(parts):
            out[i] += w * p.dim
    return out


def pairing(mu: QuiverCocharacter, chi: ChiTheta) -> int:
    total = 0
    for m, row, part in zip(mu.mux, chi.dx, chi.partitions):
        total += sum(-e * k for e, k in zip(row, _block_exponents(m, part)))
    return total


def pairing_via_degree_formula(mu0: GradedCocharacter, fls: FilteredLocalSystem, d: int) -> Fraction:
    """-d sum_j (d'_j - d'_{j-1}) deg(L_j): L_1 = V > L_2 > ... the flag of mu0, d'_j increasing, d'_0 = 0."""
    flag = cochar_to_flag(mu0)
    if not all(fls.rep.n == 0 or all(S.is_invariant(g) for g in fls.rep.generators()) for S in flag.steps):
        raise PreconditionError("the cocharacter flag is not invariant, so the limit does not exist")
    dprime = sorted(mu0.weights)
    total, prev = Fraction(0), 0
    for w, S in zip(dprime, flag.steps):
        deg = degree(fls) if S.dim == fls.n else sub_degree(fls, S)
        total += (w - prev) * deg
        prev = w
    return -d * total


def limit_exists(mu: QuiverCocharacter, point: QuiverPoint):
    """(True, limit point) or (False, None) for t -> 0 of mu(t) . point."""
    F = point.field
    out = {}
    for a, M in point.arrows:
        if a[0] in "ab":
            out[a] = cochar_limit(F, mu.mu0, M, mu.mu0)
    for x, m in zip(point.punctures, mu.mux):
        out[in_arrow(x)] = cochar_limit(F, m, point[in_arrow(x)], mu.mu0)
        out[out_arrow(x)] = cochar_limit(F, mu.mu0, point[out_arrow(x)], m)
    if any(M is None for M in out.values()):
        return False, None
    return True, make_point(F, point.n, point.genus, point.punctures, out)


def adapted_lift(fls: FilteredLocalSystem, chain: Sequence[Subspace], weights: Sequence[int]):
    """A point over fls with a cocharacter whose v0 flag is ``chain``.

    ``chain`` is a decreasing list of invariant subspaces starting with the
    whole space; ``weights`` are strictly increasing (deeper steps heavier).
    Each h_x sends a basis adapted to both the chain and the flag at x to the
    standard basis and mu_x is the matching diagonal cocharacter, so it lies in
    L_x. mu_0 may use any splitting of the chain: two splittings differ by the
    unipotent radical, which the limit contracts.
    """
    F, n = fls.field, fls.n
    chain = list(chain)
    if len(weights) != len(chain) or any(a >= b for a, b in zip(weights, weights[1:])):
        raise PreconditionError("need strictly increasing weights, one per chain step")
    arrows = {}
    for i, (a, b) in enumerate(zip(fls.rep.A, fls.rep.B), start=1):
        arrows[f"a{i}"], arrows[f"b{i}"] = a, b
    mux = []
    for x, wf, c in zip(fls.punctures, fls.flags, fls.rep.C):
        basis = common_adapted_basis(F, n, chain, wf.flag.steps[:-1])
        basis.sort(key=lambda t: (-t[2], -t[1]))
        P = tuple(zip(*[v for v, _, _ in basis]))
        arrows[in_arrow(x)] = inverse(F, P)
        arrows[out_arrow(x)] = mat_mul(F, c, P)
        mux.append(GradedCocharacter.from_columns(F, identity(F, n), [weights[i] for _, i, _ in basis]))
    cols = []
    for k in range(len(chain)):
        low = chain[k + 1] if k + 1 < len(chain) else Subspace.zero(F, n)
        cols += [(v, weights[k]) for v in _extend(low, chain[k])]
    mu0 = GradedCocharacter.from_columns(F, [v for v, _ in cols], [w for _, w in cols])
    point = make_point(F, n, fls.rep.genus, fls.punctures, arrows)
    return point, QuiverCocharacter(mu0, tuple(mux))


def _extend(low: Subspace, high: Subspace) -> list:
    have, out = low, []
    for v in high.basis:
        if not have.contains_vector(v):
            out.append(v)
            have = have + Subspace.span(low.field, low.n, [v])
    return out


# --- King stability ---------------------------------------------------------


def invariant_chains(subs: Sequence[Subspace]) -> list[tuple]:
    """All strictly decreasing chains of the given proper subspaces, largest first."""
    subs = sorted(subs, key=lambda W: (-W.dim, W.sort_key()))
    out: list[tuple] = []

    def grow(chain):
        out.append(chain)
        for W in subs:
            if W < chain[-1]:
                grow(chain + (W,))

    for W in subs:
        grow((W,))
    return out


def flag_pairings(point: QuiverPoint, typ: QuiverType, lattice=None):
    """(fls, [(pairing, chain)], certificate) over every invariant flag with unit weight gaps.

    Each flag gets its own point in the fiber of the projection to the
    filtered system (see :func:`adapted_lift`); the limit is checked to exist
    before the pairing is read off.
    """
    from .surface import invariant_lattice

    fls = point_to_fls(point, typ)
    if degree(fls) != 0:
        raise PreconditionError("king_check needs degree zero (chi trivial on scalars)")
    lat = lattice if lattice is not None else invariant_lattice(fls.rep)
    chi = chi_theta(typ)
    V = Subspace.full(fls.field, fls.n)
    scored = []
    for chain in invariant_chains(lat.proper()):
        full = (V,) + chain
        lift, mu = adapted_lift(fls, full, list(range(len(full))))
        ok, _ = limit_exists(mu, lift)
        if not ok:
            raise RuntimeError("adapted cocharacter has no limit")
        scored.append((pairing(mu, chi), chain))
    return fls, scored, "complete" if lat.complete else "incomplete"


def king_check(point: QuiverPoint, typ: QuiverType, lattice=None) -> StabilityVerdict:
    """chi_theta-stability by the numerical criterion over invariant flags.

    Semistable iff every pairing is >= 0, stable iff every proper flag pairs > 0.
    """
    fls, scored, cert = flag_pairings(point, typ, lattice)
    singles = [(s, ch[0]) for s, ch in scored if len(ch) == 1]
    neg = [t for t in singles if t[0] < 0]
    if neg:
        s, W = min(neg, key=lambda t: (t[0], t[1].sort_key()))
        return StabilityVerdict(UNSTABLE, W, sub_degree(fls, W), W.dim, cert)
    if any(s < 0 for s, _ in scored):
        raise RuntimeError("a chain pairs negatively while no single step does")
    if cert != "complete":
        if singles and chi_theta(typ).is_trivial():
            # every pairing vanishes, wherever the missing flags are
            W = min((W for _, W in singles), key=Subspace.sort_key)
            return StabilityVerdict(SEMISTABLE, W, sub_degree(fls, W), W.dim, "trivial-character")
        raise IncompleteCertificate("no destabilizing flag found and the lattice is not certified complete")
    zero = [W for s, W in singles if s == 0]
    if zero:
        W = min(zero, key=Subspace.sort_key)
        return StabilityVerdict(SEMISTABLE, W, sub_degree(fls, W), W.dim, cert)
    return StabilityVerdict(STABLE, certificate=cert)


# --- GIT equivalence --------------------------------------------------------

PARABOLIC_GAUGE = "parabolic"
LEVI_GAUGE = "levi"


def polystable_limit(point: QuiverPoint, typ: QuiverType, lattice=None) -> QuiverPoint:
    """Limit under the longest flag of pairing zero; its factors are stable, so the orbit is closed."""
    v = king_check(point, typ, lattice)
    if not v.semistable:
        raise PreconditionError("point is not semistable")
    fls, scored, _ = flag_pairings(point, typ, lattice)
    zero = [ch for s, ch in scored if s == 0]
    if not zero:
        return point
    chain = min(zero, key=lambda ch: (-len(ch), tuple(W.sort_key() for W in ch)))
    full = (Subspace.full(fls.field, fls.n),) + chain
    lift, mu = adapted_lift(fls, full, list(range(len(full))))
    _, lim = limit_exists(mu, lift)
    return lim


def _rep_generators(point: QuiverPoint) -> list[Matrix]:
    g = point.genus
    gens = [point[f"a{i}"] for i in range(1, g + 1)] + [point[f"b{i}"] for i in range(1, g + 1)]
    return gens + [point.c(x) for x in point.punctures]


def orbit_element(p1: QuiverPoint, p2: QuiverPoint, typ: QuiverType, budget: int = 10**6, gauge: str = PARABOLIC_GAUGE):
    """A gauge element taking p1 to p2, or None. Searches the intertwiners of the two monodromies."""
    F = p1.field
    if not F.is_finite():
        raise PreconditionError("orbit enumeration needs a finite field")
    if gauge not in (PARABOLIC_GAUGE, LEVI_GAUGE):
        raise PreconditionError(f"unknown gauge {gauge!r}")
    n = p1.n
    H = hom_space(F, _rep_generators(p1), _rep_generators(p2)) if n else []
    if F.p ** len(H) > budget:
        raise BudgetExceeded(f"{F.p}^{len(H)} intertwiners exceed the budget {budget}")
    test = levi_membership if gauge == LEVI_GAUGE else parabolic_membership
    for coeffs in itertools.product(range(F.p), repeat=len(H)):
        X = tuple(
            tuple(sum(c * M[r][k] for c, M in zip(coeffs, H)) % F.p for k in range(n)) for r in range(n)
        )
        if not is_invertible(F, X):
            continue
        Xi = inverse(F, X)
        gx = []
        for x in p1.punctures:
            g = mat_mul(F, mat_mul(F, p2[in_arrow(x)], X), inverse(F, p1[in_arrow(x)]))
            if not test(typ.parabolic(x), g):
                break
            if mat_mul(F, mat_mul(F, X, p1[out_arrow(x)]), inverse(F, g)) != p2[out_arrow(x)]:
                break
            gx.append(g)
        else:
            if all(mat_mul(F, mat_mul(F, X, p1[a]), Xi) == p2[a] for a, _ in p1.arrows if a[0] in "ab"):
                return GaugeElement(X, tuple(gx))
    return None


def git_equivalent(
    p1: QuiverPoint, p2: QuiverPoint, typ: QuiverType, budget: int = 10**6, gauge: str = PARABOLIC_GAUGE
) -> bool:
    """Whether the closed orbits in the two orbit closures coincide.

    ``gauge="parabolic"`` lets g_x range over P_x, which is the freedom of the
    fiber-product witness; ``"levi"`` restricts it to L_x.
    """
    for p in (p1, p2):
        _check_type(p, typ)
    q1 = polystable_limit(p1, typ)
    q2 = polystable_limit(p2, typ)
    return orbit_element(q1, q2, typ, budget, gauge) is not None


# --- diagnostics -------------------------------------------------------------


def orbit_dimension(point: QuiverPoint, typ: QuiverType) -> int:
    """dim G_P - dim of the stabilizer Lie algebra (diagnostic only)."""
    from .linalg import kernel

    F, n = point.field, point.n
    blocks = [_block_indices(wf.partition) for wf in typ.flags]
    # unknowns: X0 (n*n), then for each x the Levi entries of X_x
    levi_pos = [[(r, c) for idx in b for r in idx for c in idx] for b in blocks]
    nvar = n * n + sum(len(p) for p in levi_pos)

    def var0(r, c):
        return r * n + c

    offsets, off = [], n * n
    for p in levi_pos:
        offsets.append({rc: off + k for k, rc in enumerate(p)})
        off += len(p)

    rows = []

    def emit(left_var, lhs_mat, right_var, rhs_mat):
        # entries of  Xt M - M Xs  where Xt = left_var, Xs = right_var
        for i in range(n):
            for j in range(n):
                row = [F.zero] * nvar
                for k in range(n):
                    v = left_var(i, k)
                    if v is not None:
                        row[v] = F.add(row[v], lhs_mat[k][j])
                    v = right_var(k, j)
                    if v is not None:
                        row[v] = F.sub(row[v], rhs_mat[i][k])
                rows.append(tuple(row))

    for a, M in point.arrows:
        if a[0] in "ab":
            emit(var0, M, var0, M)
    for x, offs in zip(point.punctures, offsets):
        vx = lambda r, c, o=offs: o.get((r, c))  # noqa: E731
        emit(vx, point[in_arrow(x)], var0, point[in_arrow(x)])
        emit(var0, point[out_arrow(x)], vx, point[out_arrow(x)])
    stab = len(kernel(F, tuple(rows), ncols=nvar)) if rows else nvar
    return nvar - stab


# --- JSON ---------------------------------------------------------------------


def dump_point(point: QuiverPoint) -> dict:
    F = point.field
    return {
        "genus": point.genus,
        "punctures": list(point.punctures),
        "rank": point.n,
        "arrows": {a: dump_matrix(F, M) for a, M in point.arrows},
    }


def load_point(obj) -> QuiverPoint:
    try:
        raw = obj["arrows"]
        names = list(raw)
    except (KeyError, TypeError) as exc:
        raise MalformedInput("point JSON needs 'arrows'") from exc
    if not isinstance(raw, dict) or not raw:
        raise MalformedInput("'arrows' must be a non-empty object")
    F = _field_from_any(raw)
    mats = {a: load_matrix(F, M) for a, M in raw.items()}
    genus = obj.get("genus", sum(1 for a in names if a.startswith("a")))
    punctures = obj.get("punctures") or [a[2:-3] for a in names if a.startswith("c_") and a.endswith("_in")]
    n = obj.get("rank", len(next(iter(mats.values()))))
    try:
        return make_point(F, n, genus, punctures, mats)
    except DimensionMismatch as exc:
        raise MalformedInput(str(exc)) from exc


def dump_quiver_cochar(mu: QuiverCocharacter, punctures: Sequence[str]) -> dict:
    out = {"v0": mu.mu0.dump()}
    out.update({x: m.dump() for x, m in zip(punctures, mu.mux)})
    return out


def load_quiver_cochar(F: Field, obj, punctures: Sequence[str]) -> QuiverCocharacter:
    from .flags import load_cochar

    try:
        return QuiverCocharacter(load_cochar(F, obj["v0"]), tuple(load_cochar(F, obj[x]) for x in punctures))
    except (KeyError, TypeError) as exc:
        raise MalformedInput("cocharacter JSON needs v0 and one entry per puncture") from exc
