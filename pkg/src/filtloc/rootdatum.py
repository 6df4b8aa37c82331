"""Type A root data, parabolics from rational weights, and R-stability for GL_n / SL_n.

Cocharacters and characters of the diagonal torus are vectors in Q^n paired
by the dot product. The root e_i - e_j belongs to the matrix entry (i, j).
For SL_n both sides are taken modulo the all-ones vector; vectors are stored
with coordinate sum zero.

Two identifications of cocharacters with characters are offered:

* ``basis``: chi_mu = sum_i <mu, w_i> w_i, dual to the basis of simple coroots
  (plus a central cocharacter for GL_n) with fundamental weights w_i.
* ``invariant``: the Weyl-invariant trace form, chi_mu = mu. Under it
  <alpha_i^vee, chi_mu> = <mu, alpha_i>, which is what dominance of chi_mu on
  P_mu needs, and chi_{-d theta} is the King character of the quiver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import MalformedInput, PreconditionError
from .field import Field
from .filtered import (
    SEMISTABLE,
    STABLE,
    UNSTABLE,
    FilteredLocalSystem,
    StabilityVerdict,
    WeightedFlag,
    sub_degree,
)
from .linalg import Matrix, Subspace, common_adapted_basis, det, inverse, mat_mul

GL = "GL"
SL = "SL"
BASIS_FORM = "basis"
INVARIANT_FORM = "invariant"

Vec = tuple


def _vec(v) -> Vec:
    return tuple(Fraction(x) for x in v)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class RootDatum:
    flavor: str
    n: int
    coroot_basis: tuple  # simple coroots, then the central cocharacter for GL
    weight_basis: tuple  # fundamental weights, then det for GL
    roots: tuple
    simple_count: int

    def __post_init__(self):
        r = len(self.coroot_basis)
        for i in range(r):
            for j in range(r):
                if dot(self.coroot_basis[i], self.weight_basis[j]) != (1 if i == j else 0):
                    raise PreconditionError("coroot and weight bases are not dual")
        if set(self.roots) != {tuple(-x for x in r) for r in self.roots}:
            raise PreconditionError("roots must be closed under negation")

    @property
    def rank(self) -> int:
        return len(self.coroot_basis)

    def simple_roots(self) -> list[Vec]:
        return [_simple(self.n, i) for i in range(self.simple_count)]

    def normalize(self, v: Sequence) -> Vec:
        v = _vec(v)
        if len(v) != self.n:
            raise PreconditionError(f"expected a vector of length {self.n}")
        if self.flavor == SL:
            m = sum(v, Fraction(0)) / self.n
            v = tuple(x - m for x in v)
        return v

    def pair(self, mu: Sequence, chi: Sequence) -> Fraction:
        return dot(self.normalize(mu), self.normalize(chi))

    def dump(self) -> dict:
        q = lambda v: [_q(x) for x in v]  # noqa: E731
        return {
            "rank": self.rank,
            "flavor": self.flavor,
            "n": self.n,
            "simple_coroots": [q(v) for v in self.coroot_basis],
            "fundamental_weights": [q(v) for v in self.weight_basis],
            "roots": [q(v) for v in self.roots],
        }


def _q(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _simple(n: int, i: int) -> Vec:
    return tuple(Fraction(1) if k == i else Fraction(-1) if k == i + 1 else Fraction(0) for k in range(n))


def type_a(n: int, flavor: str = SL) -> RootDatum:
    """GL_n or SL_n with the diagonal torus and the upper-triangular Borel."""
    if n < 1 or flavor not in (GL, SL):
        raise PreconditionError("need n >= 1 and flavor GL or SL")
    ones = (Fraction(1),) * n
    coroots = [_simple(n, i) for i in range(n - 1)]
    weights = []
    for k in range(1, n):
        weights.append(tuple(Fraction(1 if j < k else 0) - Fraction(k, n) for j in range(n)))
    if flavor == GL:
        coroots.append(tuple(Fraction(1, n) for _ in range(n)))
        weights.append(ones)
    roots = [tuple(Fraction((k == i) - (k == j)) for k in range(n)) for i in range(n) for j in range(n) if i != j]
    return RootDatum(flavor, n, tuple(coroots), tuple(weights), tuple(roots), n - 1)


def load_root_datum(obj) -> RootDatum:
    try:
        flavor, n = obj.get("flavor", SL), obj["n"]
        rd = RootDatum(
            flavor,
            n,
            tuple(_vec(Fraction(str(x)) for x in v) for v in obj["simple_coroots"]),
            tuple(_vec(Fraction(str(x)) for x in v) for v in obj["fundamental_weights"]),
            tuple(_vec(Fraction(str(x)) for x in v) for v in obj["roots"]),
            obj.get("simple_count", len(obj["simple_coroots"]) - (flavor == GL)),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedInput("root datum JSON needs n, simple_coroots, fundamental_weights, roots") from exc
    return rd


# --- weights and parabolics ------------------------------------------------


def clear_denominators(theta: Sequence) -> tuple[int, tuple]:
    theta = _vec(theta)
    d = math.lcm(*(x.denominator for x in theta)) if theta else 1
    return d, tuple(int(x * d) for x in theta)


@dataclass(frozen=True)
class ParabolicFromWeight:
    theta: Vec
    unipotent: frozenset  # <theta, r> > 0
    levi: frozenset  # = 0
    roots: frozenset  # >= 0

    def is_standard(self, rd: RootDatum) -> bool:
        """Contains the upper-triangular Borel."""
        return all(r in self.roots for r in rd.simple_roots())

    def allows_entry(self, i: int, j: int) -> bool:
        if i == j:
            return True
        n = len(self.theta)
        return tuple(Fraction((k == i) - (k == j)) for k in range(n)) in self.roots


def parabolic_from_weight(rd: RootDatum, theta: Sequence) -> ParabolicFromWeight:
    th = rd.normalize(theta)
    up, lev = set(), set()
    for r in rd.roots:
        s = dot(th, r)
        if s > 0:
            up.add(r)
        elif s == 0:
            lev.add(r)
    return ParabolicFromWeight(th, frozenset(up), frozenset(lev), frozenset(up | lev))


def matrix_in_parabolic(P: ParabolicFromWeight, g: Matrix) -> bool:
    n = len(P.theta)
    return all(g[i][j] == 0 or P.allows_entry(i, j) for i in range(n) for j in range(n))


def matrix_in_levi(P: ParabolicFromWeight, g: Matrix) -> bool:
    n = len(P.theta)
    return all(g[i][j] == 0 or i == j or P.theta[i] == P.theta[j] for i in range(n) for j in range(n))


def weyl_normalize(theta: Sequence) -> tuple[tuple, Vec]:
    """Permutation w and w(theta) with coordinates in decreasing order (dominant chamber)."""
    th = _vec(theta)
    w = tuple(sorted(range(len(th)), key=lambda i: (-th[i], i)))
    return w, tuple(th[i] for i in w)


# --- characters ------------------------------------------------------------


def fundamental_coefficients(rd: RootDatum, chi: Sequence) -> tuple:
    """Coefficients of chi in the weight basis: <e_i, chi>."""
    c = rd.normalize(chi)
    coeffs = tuple(dot(e, c) for e in rd.coroot_basis)
    back = tuple(sum((k * w[j] for k, w in zip(coeffs, rd.weight_basis)), Fraction(0)) for j in range(rd.n))
    if back != c:
        raise PreconditionError("character is not in the span of the fundamental weights")
    return coeffs


def _levi_simple(rd: RootDatum, P: ParabolicFromWeight) -> list[bool]:
    if not P.is_standard(rd):
        raise PreconditionError("parabolic does not contain the standard Borel; normalize with weyl_normalize first")
    return [r in P.levi for r in rd.simple_roots()]


def _sign_pattern(rd: RootDatum, chi, P: ParabolicFromWeight, sign: int, strict: bool) -> bool:
    coeffs = fundamental_coefficients(rd, chi)
    in_levi = _levi_simple(rd, P)
    simple, central = coeffs[: rd.simple_count], coeffs[rd.simple_count:]
    if any(c != 0 for c in central):
        return False
    for c, lev in zip(simple, in_levi):
        if lev and c != 0:
            return False
        if c * sign < 0:
            return False
    return any(c != 0 for c in simple) if strict else True


def is_antidominant(rd: RootDatum, chi: Sequence, P: ParabolicFromWeight) -> bool:
    """chi is a nonzero non-positive combination of the fundamental weights of simple roots outside the Levi."""
    return _sign_pattern(rd, chi, P, -1, strict=True)


def is_dominant(rd: RootDatum, chi: Sequence, P: ParabolicFromWeight) -> bool:
    return _sign_pattern(rd, chi, P, +1, strict=False)


def dual_char_of_cochar(rd: RootDatum, mu: Sequence, form: str = INVARIANT_FORM) -> Vec:
    m = rd.normalize(mu)
    if form == INVARIANT_FORM:
        return m
    if form != BASIS_FORM:
        raise PreconditionError(f"unknown form {form!r}")
    out = [Fraction(0)] * rd.n
    for w in rd.weight_basis:
        c = dot(m, w)
        out = [o + c * x for o, x in zip(out, w)]
    return rd.normalize(out)


def dual_cochar_of_char(rd: RootDatum, chi: Sequence, form: str = INVARIANT_FORM) -> Vec:
    c = rd.normalize(chi)
    if form == INVARIANT_FORM:
        return c
    if form != BASIS_FORM:
        raise PreconditionError(f"unknown form {form!r}")
    out = [Fraction(0)] * rd.n
    for e in rd.coroot_basis:
        k = dot(e, c)
        out = [o + k * x for o, x in zip(out, e)]
    return rd.normalize(out)


def chi_mu_is_dominant(rd: RootDatum, mu: Sequence, form: str = INVARIANT_FORM, normalize: bool = True) -> bool:
    """Dominance of chi_mu on P_mu, after moving mu into the dominant chamber when ``normalize``."""
    m = rd.normalize(mu)
    if normalize:
        _, m = weyl_normalize(m)
    P = parabolic_from_weight(rd, m)
    return is_dominant(rd, dual_char_of_cochar(rd, m, form), P)


# --- filtered G-local systems ------------------------------------------------


def theta_vector(wf: WeightedFlag) -> Vec:
    """Torus weight of a weighted flag in its adapted basis (deepest piece first)."""
    pieces = wf.flag.piece_of_basis()
    return tuple(Fraction(wf.weights[i]) for i in pieces)


def degree_zero_g(thetas: Sequence[Sequence], flavor: str) -> bool:
    """<theta, chi> = 0 for every character of G: det for GL_n, nothing for SL_n."""
    if flavor == SL:
        return True
    return sum((sum(_vec(t), Fraction(0)) for t in thetas), Fraction(0)) == 0


def g_quiver_membership(point, thetas: Sequence[Sequence]) -> dict | None:
    """Witnesses g_x = in with in * out in P_{-theta_x}, or None."""
    F = point.field
    from .quiver import in_arrow, out_arrow

    out = {}
    for x, th in zip(point.punctures, thetas):
        P = parabolic_from_weight(type_a(point.n, GL), tuple(-t for t in _vec(th)))
        if not matrix_in_parabolic(P, mat_mul(F, point[in_arrow(x)], point[out_arrow(x)])):
            return None
        out[x] = point[in_arrow(x)]
    return out


@dataclass(frozen=True)
class GChiTheta:
    d: int
    characters: tuple  # per puncture, an integral torus character


def g_chi_theta(thetas: Sequence[Sequence], n: int, flavor: str = GL, form: str = INVARIANT_FORM) -> GChiTheta:
    rd = type_a(n, flavor)
    allw = [x for t in thetas for x in _vec(t)]
    d = math.lcm(*(x.denominator for x in allw)) if allw else 1
    chars = tuple(dual_char_of_cochar(rd, tuple(-d * x for x in _vec(t)), form) for t in thetas)
    return GChiTheta(d, chars)


def evaluate_torus_character(F: Field, chi: Sequence, diag: Sequence):
    out = F.one
    for k, t in zip(chi, diag):
        k = Fraction(k)
        if k.denominator != 1:
            raise PreconditionError("character is not integral")
        e = int(k)
        base = t if e >= 0 else F.inv(t)
        for _ in range(abs(e)):
            out = F.mul(out, base)
    return out


def _normalizing_frame(fls: FilteredLocalSystem, chain: Sequence[Subspace], x_index: int):
    """g with g(chain) standard (initial segments) and g(flag at x) spanned by coordinates.

    Returns (g, theta_x in the new coordinates).
    """
    F, n = fls.field, fls.n
    wf = fls.flags[x_index]
    basis = common_adapted_basis(F, n, chain, wf.flag.steps[:-1])
    basis.sort(key=lambda t: (-t[1], -t[2]))
    P = tuple(zip(*[v for v, _, _ in basis]))
    theta = tuple(Fraction(wf.weights[j]) for _, _, j in basis)
    return inverse(F, P), theta


def theta_filtered_witness(fls: FilteredLocalSystem) -> list[Matrix]:
    """g_x with g_x rho(c_x) g_x^{-1} in P_{-theta_x}; PreconditionError if some puncture fails."""
    F, n = fls.field, fls.n
    rd = type_a(n, GL)
    out = []
    for wf, c in zip(fls.flags, fls.rep.C):
        g = inverse(F, wf.flag.basis_matrix())
        P = parabolic_from_weight(rd, tuple(-t for t in theta_vector(wf)))
        if not matrix_in_parabolic(P, mat_mul(F, mat_mul(F, g, c), wf.flag.basis_matrix())):
            raise PreconditionError("monodromy is not conjugate into P_{-theta}: weights must decrease with depth")
        out.append(g)
    return out


def r_stability(fls: FilteredLocalSystem, flavor: str = GL, lattice=None) -> StabilityVerdict:
    """Ramanathan-style stability over parabolics compatible with rho.

    Compatible proper parabolics are stabilizers of invariant flags. For a
    flag with step dimensions k, the anti-dominant cone (trivial on the centre
    of G) is generated by -(w_k) with w_k the fundamental weight, which for GL_n
    is e_1 + ... + e_k - (k/n) det. Each <theta_x, chi> is evaluated in a frame
    where the parabolic contains the Borel and theta_x is diagonal.
    """
    from .quiver import invariant_chains
    from .surface import invariant_lattice

    F, n = fls.field, fls.n
    if flavor == SL and any(det(F, g) != F.one for g in fls.rep.generators()):
        raise PreconditionError("an SL_n local system needs determinant-one monodromy")
    theta_filtered_witness(fls)
    rd = type_a(n, flavor)
    lat = lattice if lattice is not None else invariant_lattice(fls.rep)
    V = Subspace.full(F, n)
    scores = {}
    for chain in invariant_chains(lat.proper()):
        full = [V] + list(chain)
        frames = [_normalizing_frame(fls, full, i) for i in range(len(fls.flags))]
        for W in chain:
            k = W.dim
            gen = tuple(-x for x in rd.weight_basis[k - 1])
            val = sum((rd.pair(th, gen) for _, th in frames), Fraction(0))
            if W in scores and scores[W] != val:
                raise RuntimeError("pairing depends on the chosen flag")
            scores[W] = val
    cert = "complete" if lat.complete else "incomplete"
    neg = [(v, W) for W, v in scores.items() if v < 0]
    if neg:
        v, W = min(neg, key=lambda t: (t[0], t[1].sort_key()))
        return StabilityVerdict(UNSTABLE, W, sub_degree(fls, W), W.dim, cert)
    if cert != "complete":
        from .errors import IncompleteCertificate

        if scores and all(wf.flag.length == 1 for wf in fls.flags):
            # central theta pairs to zero with every fundamental weight
            W = min(scores, key=Subspace.sort_key)
            return StabilityVerdict(SEMISTABLE, W, sub_degree(fls, W), W.dim, "uniform-weights")

        raise IncompleteCertificate("no destabilizing parabolic found and the lattice is not certified complete")
    zero = [W for W, v in scores.items() if v == 0]
    if zero:
        W = min(zero, key=Subspace.sort_key)
        return StabilityVerdict(SEMISTABLE, W, sub_degree(fls, W), W.dim, cert)
    return StabilityVerdict(STABLE, certificate=cert)
