"""Filtered local systems: a surface representation plus a weighted flag at each puncture.

The degree is sum_x sum_i theta_{x,i} * dim(L_{x,i}/L_{x,i+1}). An invariant
subspace W inherits the flag {W cap L_{x,i}}, each piece weighted by the
largest i whose step contains it. A quotient V/W inherits the images of the
steps with the same largest-index rule, which makes degrees additive on
short exact sequences.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .canonical import invariant_factors
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    IncompleteCertificate,
    MalformedInput,
    PreconditionError,
)
from .field import Field
from .flags import Flag, load_flag
from .invariant import hom_space
from .linalg import Matrix, Subspace, det, dump_matrix, inverse, mat_vec
from .surface import (
    SurfaceRep,
    conjugate_rep,
    dump_rep,
    invariant_lattice,
    load_rep,
    quotient,
    restrict,
)

STABLE = "stable"
SEMISTABLE = "semistable-not-stable"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class WeightedFlag:
    flag: Flag
    weights: tuple  # one Fraction per piece, top piece first

    def __post_init__(self):
        if len(self.weights) != self.flag.length:
            raise PreconditionError("need one weight per flag piece")
        if len(set(self.weights)) != len(self.weights):
            raise PreconditionError("weights at a puncture must be pairwise distinct")

    @property
    def partition(self) -> tuple:
        return self.flag.partition

    @property
    def steps(self) -> tuple:
        return self.flag.steps

    def local_degree(self) -> Fraction:
        return sum((Fraction(w) * lam for w, lam in zip(self.weights, self.partition)), Fraction(0))

    def image(self, g: Matrix) -> "WeightedFlag":
        return WeightedFlag(self.flag.image(g), self.weights)

    def dump(self) -> dict:
        F = self.flag.field
        return {
            "steps": [dump_matrix(F, S.basis) for S in self.flag.steps[:-1]],
            "weights": [_dump_q(w) for w in self.weights],
        }

    @staticmethod
    def trivial(F: Field, n: int, weight=0) -> "WeightedFlag":
        return WeightedFlag(Flag.trivial(F, n), (Fraction(weight),))

    @staticmethod
    def standard(F: Field, partition: Sequence[int], weights: Sequence) -> "WeightedFlag":
        return WeightedFlag(Flag.standard(F, partition), tuple(Fraction(w) for w in weights))


def _dump_q(w) -> str:
    w = Fraction(w)
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


@dataclass(frozen=True)
class FilteredLocalSystem:
    rep: SurfaceRep
    flags: tuple  # WeightedFlag per puncture, in puncture order

    def __post_init__(self):
        if len(self.flags) != len(self.rep.punctures):
            raise PreconditionError("need one weighted flag per puncture")
        for x, wf, c in zip(self.rep.punctures, self.flags, self.rep.C):
            if wf.flag.n != self.rep.n or wf.flag.field != self.rep.field:
                raise DimensionMismatch(f"flag at {x} lives in the wrong space")
            if not wf.flag.is_stable_under(c):
                raise PreconditionError(f"monodromy at {x} does not preserve its flag")

    @property
    def field(self) -> Field:
        return self.rep.field

    @property
    def n(self) -> int:
        return self.rep.n

    @property
    def punctures(self) -> tuple:
        return self.rep.punctures

    def flag_at(self, x: str) -> WeightedFlag:
        return self.flags[self.punctures.index(x)]


def make_fls(rep: SurfaceRep, flags) -> FilteredLocalSystem:
    if isinstance(flags, dict):
        flags = [flags[x] for x in rep.punctures]
    return FilteredLocalSystem(rep, tuple(flags))


def degree(fls: FilteredLocalSystem) -> Fraction:
    return sum((wf.local_degree() for wf in fls.flags), Fraction(0))


def slope(fls: FilteredLocalSystem) -> Fraction:
    return degree(fls) / fls.n


def sub_flag_data(wf: WeightedFlag, W: Subspace) -> tuple[list[Subspace], list[Fraction]]:
    """Distinct members of {W cap L_i} and the weight of each piece (largest-index rule)."""
    steps = wf.flag.steps
    inter = [W & L for L in steps]
    subs, weights = [], []
    for i in range(len(steps) - 1):
        if inter[i] != inter[i + 1]:
            subs.append(inter[i])
            weights.append(wf.weights[i])
    return subs, weights


def quotient_flag_data(wf: WeightedFlag, W: Subspace) -> tuple[list[Subspace], list[Fraction]]:
    """Distinct members of {L_i + W} and the weight of each piece (largest-index rule)."""
    steps = wf.flag.steps
    sums = [L + W for L in steps]
    subs, weights = [], []
    for i in range(len(steps) - 1):
        if sums[i] != sums[i + 1]:
            subs.append(sums[i])
            weights.append(wf.weights[i])
    return subs, weights


def sub_degree(fls: FilteredLocalSystem, W: Subspace) -> Fraction:
    """Degree of the induced sub-system, from intersection dimensions."""
    total = Fraction(0)
    for wf in fls.flags:
        steps = wf.flag.steps
        for i in range(len(steps) - 1):
            total += Fraction(wf.weights[i]) * ((W & steps[i]).dim - (W & steps[i + 1]).dim)
    return total


def induced_sub(fls: FilteredLocalSystem, W: Subspace) -> FilteredLocalSystem:
    """The filtered sub-system on W, written in W's echelon basis."""
    if W.dim == 0:
        raise PreconditionError("the sub-system must be nonzero")
    rep = restrict(fls.rep, W)
    F = fls.field
    flags = []
    for wf in fls.flags:
        subs, weights = sub_flag_data(wf, W)
        local = [Subspace.span(F, W.dim, [W.coordinates(v) for v in S.basis]) for S in subs]
        flags.append(WeightedFlag(Flag.from_subspaces(F, W.dim, local), tuple(weights)))
    return FilteredLocalSystem(rep, tuple(flags))


def induced_quotient(fls: FilteredLocalSystem, W: Subspace) -> FilteredLocalSystem:
    """The filtered quotient V/W, in the basis W.complement_basis()."""
    if W.dim == fls.n:
        raise PreconditionError("the quotient must be nonzero")
    rep = quotient(fls.rep, W)
    F = fls.field
    k, m = W.dim, fls.n - W.dim
    P_inv = inverse(F, tuple(zip(*(list(W.basis) + W.complement_basis()))))
    flags = []
    for wf in fls.flags:
        subs, weights = quotient_flag_data(wf, W)
        local = []
        for S in subs:
            vecs = [mat_vec(F, P_inv, v)[k:] for v in S.basis]
            local.append(Subspace.span(F, m, vecs))
        flags.append(WeightedFlag(Flag.from_subspaces(F, m, local), tuple(weights)))
    return FilteredLocalSystem(rep, tuple(flags))


def subquotient(fls: FilteredLocalSystem, low: Subspace, high: Subspace) -> FilteredLocalSystem:
    """The filtered system high/low for invariant low < high."""
    sub = induced_sub(fls, high)
    low_local = Subspace.span(fls.field, high.dim, [high.coordinates(v) for v in low.basis])
    if low_local.dim == 0:
        return sub
    return induced_quotient(sub, low_local)


def transport(fls: FilteredLocalSystem, g: Matrix) -> FilteredLocalSystem:
    """Isomorphic copy: representation g rho g^{-1}, flags moved by g."""
    return FilteredLocalSystem(conjugate_rep(fls.rep, g), tuple(wf.image(g) for wf in fls.flags))


@dataclass(frozen=True)
class StabilityVerdict:
    cls: str
    witness: Subspace | None = None
    witness_degree: Fraction | None = None
    witness_rank: int | None = None
    certificate: str = "complete"

    @property
    def semistable(self) -> bool:
        return self.cls != UNSTABLE

    @property
    def stable(self) -> bool:
        return self.cls == STABLE

    def dump(self) -> dict:
        w = None
        if self.witness is not None:
            w = {
                "subspace": self.witness.dump(),
                "degree": _dump_q(self.witness_degree),
                "rank": self.witness_rank,
            }
        return {"class": self.cls, "witness": w, "certificate": self.certificate}


def _lattice(fls: FilteredLocalSystem, lattice=None):
    return lattice if lattice is not None else invariant_lattice(fls.rep)


def _uniform(fls: FilteredLocalSystem) -> bool:
    return all(wf.flag.length == 1 for wf in fls.flags)


def _verdict_from_scores(scored, certificate: str, uniform: bool = False) -> StabilityVerdict:
    """scored: list of (excess, W, deg) where excess > 0 destabilizes and = 0 is critical."""
    worst = [s for s in scored if s[0] > 0]
    if worst:
        top = max(s[0] for s in worst)
        cands = [s for s in worst if s[0] == top]
        _, W, d = min(cands, key=lambda s: s[1].sort_key())
        return StabilityVerdict(UNSTABLE, W, d, W.dim, certificate)
    if certificate != "complete":
        if uniform and scored:
            # one weight per puncture: every subspace has the global slope
            _, W, d = min(scored, key=lambda s: s[1].sort_key())
            return StabilityVerdict(SEMISTABLE, W, d, W.dim, "uniform-weights")
        raise IncompleteCertificate("no destabilizing subspace found and the search is not certified complete")
    ties = [s for s in scored if s[0] == 0]
    if ties:
        _, W, d = min(ties, key=lambda s: s[1].sort_key())
        return StabilityVerdict(SEMISTABLE, W, d, W.dim, certificate)
    return StabilityVerdict(STABLE, certificate=certificate)


def slope_stability(fls: FilteredLocalSystem, lattice=None) -> StabilityVerdict:
    if fls.n < 1:
        raise PreconditionError("rank must be at least one")
    lat = _lattice(fls, lattice)
    D, n = degree(fls), fls.n
    scored = []
    for W in lat.proper():
        d = sub_degree(fls, W)
        # slope(W) - slope(V), scaled by rk(W) * n > 0
        scored.append((d * n - D * W.dim, W, d))
    return _verdict_from_scores(scored, "complete" if lat.complete else "incomplete", _uniform(fls))


def degree_zero_simplified_stability(fls: FilteredLocalSystem, lattice=None) -> StabilityVerdict:
    if degree(fls) != 0:
        raise PreconditionError("the sign-only test needs total degree zero")
    lat = _lattice(fls, lattice)
    scored = [(sub_degree(fls, W), W, sub_degree(fls, W)) for W in lat.proper()]
    return _verdict_from_scores(scored, "complete" if lat.complete else "incomplete", _uniform(fls))


def _require_ss_degree_zero(fls: FilteredLocalSystem, lattice=None) -> StabilityVerdict:
    if degree(fls) != 0:
        raise PreconditionError("system must have degree zero")
    v = slope_stability(fls, lattice)
    if not v.semistable:
        raise PreconditionError("system must be semistable")
    return v


@dataclass(frozen=True)
class JordanHolder:
    filtration: tuple  # 0 = F_0 < F_1 < ... < F_m = V
    factors: tuple  # stable degree-zero systems F_i / F_{i-1}, bottom first

    def gr(self) -> tuple:
        return tuple(sorted(self.factors, key=factor_signature))


def jordan_holder(fls: FilteredLocalSystem) -> JordanHolder:
    v = _require_ss_degree_zero(fls)
    F, n = fls.field, fls.n
    if v.stable:
        return JordanHolder((Subspace.zero(F, n), Subspace.full(F, n)), (fls,))
    lat = invariant_lattice(fls.rep)
    zero_deg = [W for W in lat.proper() if sub_degree(fls, W) == 0]
    S = min(zero_deg, key=Subspace.sort_key)
    bottom = induced_sub(fls, S)
    rest = jordan_holder(induced_quotient(fls, S))
    comp = S.complement_basis()

    def lift(U: Subspace) -> Subspace:
        vecs = [tuple(sum((c * w[k] for c, w in zip(u, comp)), F.zero) for k in range(n)) for u in U.basis]
        return S + Subspace.span(F, n, vecs)

    chain = (Subspace.zero(F, n),) + tuple(lift(U) for U in rest.filtration)
    return JordanHolder(chain, (bottom,) + rest.factors)


def gr(fls: FilteredLocalSystem) -> tuple:
    return jordan_holder(fls).gr()


def factor_signature(fls: FilteredLocalSystem):
    """Isomorphism invariant used to sort gr: rank, weighted partitions, invariant factors."""
    F = fls.field
    wts = tuple(tuple(zip(wf.weights, wf.partition)) for wf in fls.flags)
    inv = tuple(
        tuple(tuple(int(c) if F.characteristic else c for c in f) for f in invariant_factors(F, M))
        for M in fls.rep.generators()
    )
    return (fls.n, wts, inv)


def isomorphism(f1: FilteredLocalSystem, f2: FilteredLocalSystem, budget: int = 10**6):
    """An invertible g with g rho_1 g^{-1} = rho_2 and g L1_{x,i} = L2_{x,i}, or None."""
    if f1.rep.presentation != f2.rep.presentation or f1.n != f2.n or f1.field != f2.field:
        return None
    for a, b in zip(f1.flags, f2.flags):
        if a.weights != b.weights or a.partition != b.partition:
            return None
    F, n = f1.field, f1.n
    if n == 0:
        return ()
    # intertwiners: X g1 = g2 X for all generators
    base = hom_space(F, f1.rep.generators(), f2.rep.generators()) if f1.rep.generators() else _all_maps(F, n)
    if not base:
        return None
    # flag conditions are linear in the coefficients of base elements
    rows = []
    for a, b in zip(f1.flags, f2.flags):
        for L1, L2 in zip(a.flag.steps, b.flag.steps):
            ann = L2.annihilator().basis
            for v in L1.basis:
                for row in ann:
                    rows.append(tuple(_dot(F, row, mat_vec(F, X, v)) for X in base))
    from .linalg import kernel

    coeffs = kernel(F, tuple(rows), ncols=len(base)) if rows else kernel(F, (), ncols=len(base))
    if not coeffs:
        return None
    H = [_combine(F, coeffs_k, base) for coeffs_k in coeffs]
    return _find_invertible(F, H, n, budget)


def _dot(F: Field, a, b):
    out = F.zero
    for x, y in zip(a, b):
        out = F.add(out, F.mul(x, y))
    return out


def _combine(F: Field, coeffs, mats) -> Matrix:
    n = len(mats[0])
    out = [[F.zero] * n for _ in range(n)]
    for c, M in zip(coeffs, mats):
        if c == 0:
            continue
        for i in range(n):
            for j in range(n):
                out[i][j] = F.add(out[i][j], F.mul(c, M[i][j]))
    return tuple(tuple(r) for r in out)


def _all_maps(F: Field, n: int) -> list:
    out = []
    for i in range(n):
        for j in range(n):
            out.append(tuple(tuple(F.one if (r, c) == (i, j) else F.zero for c in range(n)) for r in range(n)))
    return out


def _find_invertible(F: Field, H: list, n: int, budget: int):
    """Search a linear space of matrices for an invertible element.

    det is a polynomial of degree <= n in each coefficient, so if it is not
    identically zero it is nonzero somewhere on any grid with n + 1 values per
    coordinate. Over a small prime field the grid is the whole field.
    """
    h = len(H)
    if F.is_finite() and F.characteristic <= n:
        values = list(F.elements())
    else:
        values = [F(k) for k in range(n + 1)]
    if len(values) ** h > budget:
        raise BudgetExceeded(f"isomorphism search needs {len(values) ** h} trials")
    for combo in itertools.product(values, repeat=h):
        if not any(c != 0 for c in combo):
            continue
        g = _combine(F, combo, H)
        if det(F, g) != 0:
            return g
    return None


def isomorphic(f1: FilteredLocalSystem, f2: FilteredLocalSystem, budget: int = 10**6) -> bool:
    return isomorphism(f1, f2, budget) is not None


def s_equivalent(f1: FilteredLocalSystem, f2: FilteredLocalSystem) -> bool:
    if f1.n != f2.n:
        raise PreconditionError("systems must have the same rank")
    _require_ss_degree_zero(f1)
    _require_ss_degree_zero(f2)
    g1, g2 = list(gr(f1)), list(gr(f2))
    if len(g1) != len(g2):
        return False
    remaining = list(g2)
    for a in g1:
        hit = next((i for i, b in enumerate(remaining) if isomorphic(a, b)), None)
        if hit is None:
            return False
        remaining.pop(hit)
    return True


def dump_fls(fls: FilteredLocalSystem) -> dict:
    out = dump_rep(fls.rep)
    out["flags"] = {x: wf.dump() for x, wf in zip(fls.punctures, fls.flags)}
    return out


def load_fls(obj: dict) -> FilteredLocalSystem:
    rep = load_rep(obj)
    F, n = rep.field, rep.n
    raw = obj.get("flags", {})
    if not isinstance(raw, dict) or set(raw) != set(rep.punctures):
        raise MalformedInput("need one flag entry per puncture")
    flags = []
    for x in rep.punctures:
        entry = raw[x]
        try:
            weights = tuple(Fraction(str(w)) for w in entry["weights"])
        except (KeyError, ValueError, ZeroDivisionError, TypeError) as exc:
            raise MalformedInput(f"bad weights at {x}") from exc
        flag = load_flag(F, {"ambient": n, "steps": entry.get("steps", [])})
        flags.append(WeightedFlag(flag, weights))
    return FilteredLocalSystem(rep, tuple(flags))
