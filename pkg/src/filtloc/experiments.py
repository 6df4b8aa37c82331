"""Agreement suites: slope vs King, slope vs R-stability, S-equivalence vs GIT equivalence.

Each suite yields an :class:`ExperimentReport`. Reports serialize as JSON lines,
one per instance, then a summary object. Nothing time-dependent is written
unless timing is requested, so reports are byte-stable for a fixed seed.
"""

from __future__ import annotations

import functools
import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import BudgetExceeded, PreconditionError
from .field import Field, PrimeField
from .filtered import (
    FilteredLocalSystem,
    WeightedFlag,
    degree,
    degree_zero_simplified_stability,
    dump_fls,
    make_fls,
    s_equivalent,
    slope_stability,
    transport,
)
from .flags import Flag
from .linalg import Subspace, enumerate_subspaces, general_linear_group, identity, inverse, mat_mul
from .quiver import (
    QuiverPoint,
    GaugeElement,
    QuiverType,
    adapted_lift,
    chi_theta,
    dump_point,
    gauge_act,
    git_equivalent,
    in_arrow,
    invariant_chains,
    king_check,
    limit_exists,
    make_point,
    out_arrow,
    pairing,
    pairing_via_degree_formula,
    rep_to_point,
)
from .rootdatum import r_stability
from .sampling import (
    degree_zero_weights,
    random_invertible,
    random_subspace,
    sample_fls,
)
from .surface import invariant_lattice, make_rep


@dataclass
class ExperimentReport:
    name: str
    instance_count: int = 0
    tallies: dict = field(default_factory=dict)  # property -> [agree, total]
    counterexamples: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    timing: float | None = None
    lines: list = field(default_factory=list)

    def record(self, prop: str, agree: bool, instance=None):
        t = self.tallies.setdefault(prop, [0, 0])
        t[1] += 1
        if agree:
            t[0] += 1
        elif instance is not None:
            self.counterexamples.append({"property": prop, "instance": instance})

    def certificate(self, cert: str):
        self.certificates[cert] = self.certificates.get(cert, 0) + 1

    def all_agree(self) -> bool:
        return all(a == t for k, (a, t) in self.tallies.items() if not k.startswith("info:"))

    def summary(self) -> dict:
        out = {
            "summary": self.name,
            "instances": self.instance_count,
            "tallies": {k: {"agree": a, "total": t} for k, (a, t) in sorted(self.tallies.items())},
            "counterexamples": self.counterexamples,
            "certificates": dict(sorted(self.certificates.items())),
        }
        if self.timing is not None:
            out["seconds"] = round(self.timing, 3)
        return out

    def to_jsonl(self) -> str:
        rows = [json.dumps(r, sort_keys=True) for r in self.lines]
        rows.append(json.dumps(self.summary(), sort_keys=True))
        return "\n".join(rows) + "\n"


def full_flag_weights(n: int) -> tuple:
    """Top piece first: (n-1)/3, (n-3)/3, ..., -(n-1)/3; sums to zero."""
    return tuple(Fraction(n - 1 - 2 * i, 3) for i in range(n))


# --- exhaustive enumeration ----------------------------------------------------


@functools.lru_cache(maxsize=None)
def _gl(F: Field, n: int) -> tuple:
    return tuple(general_linear_group(F, n))


def all_flags(F: Field, partition: Sequence[int]) -> list[Flag]:
    n = sum(partition)
    dims, top = [], n
    for lam in partition[:-1]:
        top -= lam
        dims.append(top)
    out: list[Flag] = []

    def grow(chain, k):
        if k == len(dims):
            out.append(Flag.from_subspaces(F, n, chain))
            return
        for W in enumerate_subspaces(F, n, dims[k]):
            if not chain or W < chain[-1]:
                grow(chain + [W], k + 1)

    grow([], 0)
    return out


def exhaustive_fls(
    F: Field, genus: int, punctures: Sequence[str], n: int, weights: dict, budget: int = 10**7
) -> Iterator[FilteredLocalSystem]:
    """Every relation-satisfying system with flags of the given types (weights top piece first).

    Flags range over all flags of each type; monodromies of all but the last
    puncture range over the flag stabilizers; the last is solved.
    """
    if not isinstance(F, PrimeField):
        raise PreconditionError("exhaustive enumeration needs a finite field")
    xs = list(punctures)
    if not xs:
        raise PreconditionError("exhaustive enumeration needs at least one puncture")
    G = _gl(F, n)
    parts = {x: tuple(1 for _ in weights[x]) if len(weights[x]) == n else (n,) for x in xs}
    flags = {x: all_flags(F, parts[x]) for x in xs}
    stab = {}
    for x in xs:
        for fl in flags[x]:
            stab.setdefault(fl, [g for g in G if fl.is_stable_under(g)])
    est = len(G) ** (2 * genus)
    for x in xs:
        est *= len(flags[x])
    for x in xs[:-1]:
        est *= max(len(stab[fl]) for fl in flags[x])
    if est > budget:
        raise BudgetExceeded(f"about {est} candidate tuples exceed the budget {budget}")
    for AB in itertools.product(G, repeat=2 * genus):
        A, B = AB[:genus], AB[genus:]
        prefix = identity(F, n)
        for a, b in zip(A, B):
            prefix = mat_mul(F, prefix, mat_mul(F, mat_mul(F, a, b), mat_mul(F, inverse(F, a), inverse(F, b))))
        for fl_choice in itertools.product(*(flags[x] for x in xs)):
            for cs in itertools.product(*(stab[fl] for fl in fl_choice[:-1])):
                prod = prefix
                for c in cs:
                    prod = mat_mul(F, prod, c)
                last = inverse(F, prod)
                if not fl_choice[-1].is_stable_under(last):
                    continue
                C = dict(zip(xs, list(cs) + [last]))
                rep = make_rep(F, genus, xs, n, A, B, C, check=False)
                wfs = [WeightedFlag(fl, tuple(weights[x])) for x, fl in zip(xs, fl_choice)]
                yield make_fls(rep, wfs)


def unipotent_radical(F: Field, partition: Sequence[int]) -> list:
    """All elements of the unipotent radical of the standard parabolic."""
    n = sum(partition)
    piece = Flag.standard(F, partition).piece_of_basis()
    slots = [(r, c) for r in range(n) for c in range(n) if piece[r] > piece[c]]
    out = []
    for vals in itertools.product(range(F.p), repeat=len(slots)):
        M = [list(row) for row in identity(F, n)]
        for (r, c), v in zip(slots, vals):
            M[r][c] = v
        out.append(tuple(tuple(row) for row in M))
    return out


def point_lifts(fls: FilteredLocalSystem) -> Iterator[QuiverPoint]:
    """Every point over fls up to the Levi gauge at the puncture vertices: in = u h with u unipotent."""
    F = fls.field
    base, _ = rep_to_point(fls)
    us = [unipotent_radical(F, wf.partition) for wf in fls.flags]
    for choice in itertools.product(*us):
        arrows = dict(base.arrows)
        for x, u, c in zip(fls.punctures, choice, fls.rep.C):
            gin = mat_mul(F, u, base[in_arrow(x)])
            arrows[in_arrow(x)] = gin
            arrows[out_arrow(x)] = mat_mul(F, c, inverse(F, gin))
        yield make_point(F, fls.n, fls.rep.genus, fls.punctures, arrows)


# --- the equivalence suite ---------------------------------------------------


def equivalence_suite(
    F: Field,
    n: int,
    genus: int,
    punctures: Sequence[str],
    exhaustive: bool = False,
    samples: int = 50,
    seed: int = 0,
    budget: int = 10**7,
    lifts: bool = True,
    timing: bool = False,
) -> ExperimentReport:
    """slope vs King on points, slope vs R on systems, S vs GIT on pairs of semistable systems."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    xs = list(punctures)
    weights = {x: full_flag_weights(n) for x in xs}
    if exhaustive:
        instances = list(exhaustive_fls(F, genus, xs, n, weights, budget))
    else:
        parts = {x: (1,) * n for x in xs}
        instances = []
        for i in range(samples):
            W = random_subspace(F, n, rng.randint(1, n - 1), rng) if n > 1 and i % 2 else None
            instances.append(sample_fls(F, genus, xs, n, parts, weights, rng, preserve=W))
    rep = ExperimentReport(f"equivalence-suite {F.name()} n={n} g={genus} |D|={len(xs)}")
    semistable = []
    for idx, fls in enumerate(instances):
        lat = invariant_lattice(fls.rep)
        rep.certificate("complete" if lat.complete else "incomplete")
        sv = slope_stability(fls, lat)
        rv = r_stability(fls, lattice=lat)
        rep.record("r=slope", rv.cls == sv.cls, dump_fls(fls))
        king_ok = 0
        points = list(point_lifts(fls)) if lifts and F.is_finite() else [rep_to_point(fls)[0]]
        typ = QuiverType.of(fls)
        for p in points:
            kv = king_check(p, typ, lat)
            agree = kv.cls == sv.cls
            king_ok += agree
            rep.record("king=slope", agree, dump_point(p))
        rep.instance_count += len(points)
        rep.lines.append({"index": idx, "slope": sv.cls, "r": rv.cls, "points": len(points), "king_agree": king_ok})
        if sv.semistable:
            semistable.append(fls)
    if F.is_finite():
        for i, fls in enumerate(semistable):
            others = [transport(fls, random_invertible(F, n, rng))]
            if i + 1 < len(semistable):
                others.append(semistable[i + 1])
            for other in others:
                agree = _git_vs_s(fls, other)
                rep.record("git=s", agree, {"a": dump_fls(fls), "b": dump_fls(other)})
    if timing:
        rep.timing = time.perf_counter() - t0
    return rep


def _git_vs_s(f1: FilteredLocalSystem, f2: FilteredLocalSystem, gauge: str = "parabolic") -> bool:
    p1, typ = rep_to_point(f1)
    p2, _ = rep_to_point(f2)
    return git_equivalent(p1, p2, typ, gauge=gauge) == s_equivalent(f1, f2)


# --- batteries used by the acceptance tests -------------------------------------


def _extension_rep(F: Field, diag_a, diag_b, x, y):
    """Genus-one rank-two upper-triangular rep with the puncture monodromy solved."""
    A = ((diag_a[0], x), (F.zero, diag_a[1]))
    B = ((diag_b[0], y), (F.zero, diag_b[1]))
    from .surface import commutator

    C = inverse(F, commutator(F, A, B))
    return make_rep(F, 1, ["x"], 2, [A], [B], {"x": C})


def s_vs_git_pairs(seed: int = 0, p: int = 5) -> list[tuple]:
    """Pairs of semistable genus-one rank-two systems with one puncture over F_p.

    Trivial weights: split and non-split extensions of the same two lines,
    extensions in the opposite order, and different line pairs. Full flags
    with weights (1/3, -1/3): systems against random transports and against
    other systems.
    """
    F = PrimeField(p)
    rng = random.Random(seed)
    units = list(range(1, p))
    triv = [WeightedFlag.trivial(F, 2)]
    out = []
    for _ in range(40):
        la = (rng.choice(units), rng.choice(units))
        lb = (rng.choice(units), rng.choice(units))
        x, y = rng.randrange(p), rng.randrange(p)
        if x == y == 0:
            x = 1
        nonsplit = make_fls(_extension_rep(F, la, lb, x, y), triv)
        split = make_fls(_extension_rep(F, la, lb, 0, 0), triv)
        flipped = make_fls(_extension_rep(F, la[::-1], lb[::-1], rng.randrange(p), rng.randrange(p)), triv)
        la2 = (la[0], rng.choice(units))
        other = make_fls(_extension_rep(F, la2, lb, x, y), triv)
        out += [(nonsplit, split), (nonsplit, flipped), (split, flipped), (nonsplit, other)]
    t = Fraction(1, 3)
    full = {"x": (1, 1)}
    stable = []
    while len(stable) < 30:
        fls = sample_fls(F, 1, ["x"], 2, full, {"x": (t, -t)}, rng)
        if slope_stability(fls).semistable:
            stable.append(fls)
    for i, fls in enumerate(stable):
        out.append((fls, transport(fls, random_invertible(F, 2, rng))))
        out.append((fls, stable[(i + 1) % len(stable)]))
    return out


def s_vs_git_battery(seed: int = 0, gauge: str = "parabolic") -> ExperimentReport:
    rep = ExperimentReport("s-equivalence vs git-equivalence")
    for f1, f2 in s_vs_git_pairs(seed):
        rep.instance_count += 1
        rep.record("git=s", _git_vs_s(f1, f2, gauge), {"a": dump_fls(f1), "b": dump_fls(f2)})
    return rep


def pairing_battery(F: Field, count: int, seed: int = 0) -> ExperimentReport:
    """Direct exponent pairing vs the telescoped degree formula on adapted cocharacters."""
    rng = random.Random(seed)
    rep = ExperimentReport(f"pairing identity {F.name()}")
    n = 2 if not F.is_finite() else 3
    types = {"x": (1,) * n, "y": (n - 1, 1), "z": (n,)}
    while rep.instance_count < count:
        ws = degree_zero_weights(types, rng) if rng.random() < 0.5 else {
            x: [Fraction(w, 4) for w in rng.sample(range(-12, 13), len(types[x]))] for x in types
        }
        W = random_subspace(F, n, rng.randint(1, n - 1), rng)
        fls = sample_fls(F, 0, list(types), n, types, ws, rng, preserve=W)
        lat = invariant_lattice(fls.rep)
        chains = invariant_chains(lat.proper())
        typ = QuiverType.of(fls)
        chi = chi_theta(typ)
        V = Subspace.full(F, n)
        for chain in rng.sample(chains, min(len(chains), 6)):
            full = (V,) + chain
            start = rng.randint(-3, 3)
            wts = [start]
            for _ in chain:
                wts.append(wts[-1] + rng.randint(1, 3))
            lift, mu = adapted_lift(fls, full, wts)
            ok, _ = limit_exists(mu, lift)
            direct = pairing(mu, chi)
            formula = pairing_via_degree_formula(mu.mu0, fls, chi.d)
            rep.instance_count += 1
            rep.record("pairing=formula", ok and direct == formula, {"fls": dump_fls(fls), "weights": wts})
    return rep


def degree_zero_battery(count: int, seed: int = 0) -> ExperimentReport:
    """Sign-only stability vs slope stability on random degree-zero systems over F_5, F_7 and Q."""
    rng = random.Random(seed)
    rep = ExperimentReport("degree-zero sign test")
    from .field import QQ

    fields = [(PrimeField(5), 2), (PrimeField(7), 3), (QQ, 2)]
    i = 0
    while rep.instance_count < count:
        F, n = fields[i % len(fields)]
        i += 1
        types = {"x": (1,) * n, "y": (1,) * n, "z": (n,)}
        ws = degree_zero_weights(types, rng)
        W = random_subspace(F, n, rng.randint(1, n - 1), rng) if rng.random() < 0.7 else None
        fls = sample_fls(F, 0, list(types), n, types, ws, rng, preserve=W)
        if degree(fls) != 0:
            raise RuntimeError("sampler produced nonzero degree")
        lat = invariant_lattice(fls.rep)
        if not lat.complete:
            # both tests would refuse to certify; draw again
            rep.certificate("incomplete-redrawn")
            continue
        rep.certificate("complete")
        a = degree_zero_simplified_stability(fls, lat).cls
        b = slope_stability(fls, lat).cls
        rep.instance_count += 1
        rep.record("sign=slope", a == b, dump_fls(fls))
    return rep


def trivial_weights_battery(p: int = 3, genus: int = 1, punctures: Sequence[str] = ("x",), n: int = 2) -> ExperimentReport:
    """All weights zero: every point semistable and chi_theta trivial, exhaustively over F_p."""
    F = PrimeField(p)
    rep = ExperimentReport(f"trivial weights F_{p} n={n} g={genus}")
    weights = {x: (0,) for x in punctures}
    for fls in exhaustive_fls(F, genus, list(punctures), n, weights):
        p0, typ = rep_to_point(fls)
        chi = chi_theta(typ)
        rep.instance_count += 1
        rep.record("chi trivial", chi.is_trivial() and all(e == 0 for row in chi.exponents for e in row))
        rep.record("king semistable", king_check(p0, typ).semistable, dump_point(p0))
    return rep


def root_datum_battery(count: int = 100, seed: int = 0) -> ExperimentReport:
    """<mu, chi> = <mu_chi, chi_mu> under both dual forms; chi_mu dominant on P_mu under the invariant form.

    The basis form is tallied separately as information: it fails dominance.
    """
    from .rootdatum import BASIS_FORM, INVARIANT_FORM, SL, chi_mu_is_dominant, dual_char_of_cochar, dual_cochar_of_char, type_a

    rng = random.Random(seed)
    rep = ExperimentReport("root datum duality")
    for n in (2, 3):
        rd = type_a(n, SL)
        for _ in range(count):
            mu = [rng.randint(-4, 4) for _ in range(n)]
            chi = [rng.randint(-4, 4) for _ in range(n)]
            rep.instance_count += 1
            for form in (INVARIANT_FORM, BASIS_FORM):
                lhs = rd.pair(mu, chi)
                rhs = rd.pair(dual_cochar_of_char(rd, chi, form), dual_char_of_cochar(rd, mu, form))
                rep.record(f"duality {form} A{n - 1}", lhs == rhs, {"mu": mu, "chi": chi})
            rep.record(f"dominance invariant A{n - 1}", chi_mu_is_dominant(rd, mu, INVARIANT_FORM), {"mu": mu})
            rep.tallies.setdefault(f"info: dominance basis A{n - 1}", [0, 0])
            t = rep.tallies[f"info: dominance basis A{n - 1}"]
            t[0] += chi_mu_is_dominant(rd, mu, BASIS_FORM)
            t[1] += 1
    return rep


def _gauge_instances(rng: random.Random) -> list[FilteredLocalSystem]:
    from .sampling import worked_example

    t = Fraction(1, 3)
    out = [worked_example(PrimeField(7))]
    specs = [
        (PrimeField(5), 1, ["x"], 2, {"x": (1, 1)}, {"x": (t, -t)}),
        (PrimeField(5), 0, ["x1", "x2", "x3"], 2, {"x1": (1, 1), "x2": (1, 1), "x3": (1, 1)}, None),
        (PrimeField(7), 0, ["x1", "x2"], 3, {"x1": (1, 1, 1), "x2": (2, 1)}, None),
        (PrimeField(3), 1, ["x"], 2, {"x": (2,)}, {"x": (0,)}),
    ]
    for k, (F, g, xs, n, parts, ws) in enumerate(specs):
        for j in range(2 if k < 3 else 1):
            W = random_subspace(F, n, 1, rng) if j % 2 else None
            if ws is None:
                ws_k = {x: sorted(w, reverse=True) for x, w in degree_zero_weights(parts, rng).items()}
            else:
                ws_k = ws
            out.append(sample_fls(F, g, xs, n, parts, ws_k, rng, preserve=W))
    return out


def gauge_battery(transports: int = 50, seed: int = 0) -> ExperimentReport:
    """Degree, slope/R/King verdicts, Betti membership and S-equivalence under random gauge transports."""
    from .betti import in_betti_locus, levi_monodromy_map, make_monodromy
    from .rootdatum import theta_vector
    from .sampling import random_levi_element

    rng = random.Random(seed)
    rep = ExperimentReport("gauge invariance")
    for fls in _gauge_instances(rng):
        F, n = fls.field, fls.n
        lat = invariant_lattice(fls.rep)
        base_deg = degree(fls)
        base_slope = slope_stability(fls, lat).cls
        base_r = r_stability(fls, lattice=lat).cls
        p0, typ = rep_to_point(fls)
        zero = base_deg == 0
        base_king = king_check(p0, typ, lat).cls if zero else None
        gammas = [theta_vector(wf) for wf in fls.flags]
        M_own = make_monodromy(F, gammas, levi_monodromy_map(p0, gammas))
        semistable = zero and base_slope != "unstable"
        for _ in range(transports):
            g0 = random_invertible(F, n, rng)
            moved = transport(fls, g0)
            mlat = invariant_lattice(moved.rep)
            inst = dump_fls(fls)
            rep.instance_count += 1
            rep.record("degree", degree(moved) == base_deg, inst)
            rep.record("slope verdict", slope_stability(moved, mlat).cls == base_slope, inst)
            rep.record("r verdict", r_stability(moved, lattice=mlat).cls == base_r, inst)
            if semistable:
                rep.record("s-equivalent to transport", s_equivalent(fls, moved), inst)
            g = GaugeElement(g0, tuple(random_levi_element(F, wf.partition, rng) for wf in fls.flags))
            q = gauge_act(p0, g)
            if zero:
                rep.record("king verdict", king_check(q, typ).cls == base_king, dump_point(p0))
            rep.record("betti locus", in_betti_locus(q, M_own) and in_betti_locus(q, M_own) == in_betti_locus(p0, M_own), dump_point(p0))
    return rep
