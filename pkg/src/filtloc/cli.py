"""Command-line front end.

Exit codes: 0 ok, 1 negative answer (unstable, relation fails, suite
disagreement), 2 malformed input, 3 failed precondition, 4 verdict withheld
because the invariant-subspace search is not certified complete.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .errors import FiltlocError, MalformedInput, PreconditionError
from .field import field_from_name


def _read(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_check_relation(args) -> int:
    from .surface import load_rep, verify_relation

    ok = verify_relation(load_rep(_read(args.rep), check=False))
    _emit(ok)
    return 0 if ok else 1


def cmd_degree(args) -> int:
    from .filtered import degree, load_fls

    print(degree(load_fls(_read(args.fls))))
    return 0


def cmd_stability(args) -> int:
    from .filtered import UNSTABLE, load_fls, slope_stability

    fls = load_fls(_read(args.fls))
    if args.method == "slope":
        v = slope_stability(fls)
    elif args.method == "king":
        from .quiver import king_check, rep_to_point

        point, typ = rep_to_point(fls)
        v = king_check(point, typ)
    else:
        from .rootdatum import r_stability

        v = r_stability(fls)
    _emit(v.dump())
    return 1 if v.cls == UNSTABLE else 0


def cmd_lift(args) -> int:
    from .filtered import load_fls
    from .quiver import dump_point, rep_to_point

    point, typ = rep_to_point(load_fls(_read(args.fls)))
    out = dump_point(point)
    out["type"] = typ.dump()
    _emit(out)
    return 0


def cmd_project(args) -> int:
    from .filtered import dump_fls
    from .quiver import load_point, load_type, point_to_fls, point_to_rep
    from .surface import dump_rep

    obj = _read(args.point)
    point = load_point(obj)
    if "type" in obj:
        _emit(dump_fls(point_to_fls(point, load_type(point.field, point.n, obj["type"]))))
    else:
        _emit(dump_rep(point_to_rep(point)))
    return 0


def cmd_pairing(args) -> int:
    from .quiver import (
        chi_theta,
        limit_exists,
        load_point,
        load_quiver_cochar,
        load_type,
        pairing,
        pairing_via_degree_formula,
        point_to_fls,
    )

    point = load_point(_read(args.point))
    mu = load_quiver_cochar(point.field, _read(args.mu), point.punctures)
    typ = load_type(point.field, point.n, _read(args.theta))
    chi = chi_theta(typ)
    value = pairing(mu, chi)
    ok, _ = limit_exists(mu, point)
    formula = None
    if ok:
        try:
            formula = str(pairing_via_degree_formula(mu.mu0, point_to_fls(point, typ), chi.d))
        except PreconditionError:
            formula = None
    _emit({"pairing": value, "degree_formula": formula, "limit_exists": ok})
    return 0


def cmd_suite(args) -> int:
    from .experiments import equivalence_suite

    F = field_from_name(args.field)
    xs = [f"x{i + 1}" for i in range(args.punctures)]
    rep = equivalence_suite(
        F,
        args.rank,
        args.genus,
        xs,
        exhaustive=args.exhaustive,
        samples=args.samples,
        seed=args.seed,
        budget=args.budget,
        timing=args.timing,
    )
    text = rep.to_jsonl()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.all_agree() else 1


def cmd_jh(args) -> int:
    from .filtered import dump_fls, jordan_holder, load_fls

    jh = jordan_holder(load_fls(_read(args.fls)))
    _emit({"filtration": [S.dump() for S in jh.filtration], "gr": [dump_fls(f) for f in jh.gr()]})
    return 0


def cmd_s_equiv(args) -> int:
    from .filtered import load_fls, s_equivalent

    _emit(s_equivalent(load_fls(_read(args.a)), load_fls(_read(args.b))))
    return 0


def cmd_betti(args) -> int:
    from .betti import in_betti_locus, load_monodromy
    from .quiver import load_point

    point = load_point(_read(args.point))
    M = load_monodromy(point.field, point.punctures, _read(args.gamma), _read(args.M))
    _emit(in_betti_locus(point, M, strict=args.strict_equality))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="filtloc", description="Filtered local systems and their quiver models.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-relation", help="does the surface relation hold")
    p.add_argument("rep")
    p.set_defaults(func=cmd_check_relation)

    p = sub.add_parser("degree", help="parabolic degree, exact")
    p.add_argument("fls")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("stability", help="stability verdict as JSON")
    p.add_argument("fls")
    p.add_argument("--method", choices=["slope", "king", "r"], default="slope")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("lift", help="canonical quiver point over a filtered system")
    p.add_argument("fls")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("project", help="filtered system (or bare representation) of a quiver point")
    p.add_argument("point")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("pairing", help="<mu, chi_theta> with the degree-formula cross-check")
    p.add_argument("point")
    p.add_argument("mu")
    p.add_argument("theta")
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("equivalence-suite", help="agreement suite, JSON lines")
    p.add_argument("--field", default="F5")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--punctures", type=int, default=2)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--timing", action="store_true", help="add wall time to the summary (breaks byte stability)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("jh", help="Jordan-Holder filtration and gr")
    p.add_argument("fls")
    p.set_defaults(func=cmd_jh)

    p = sub.add_parser("s-equiv", help="S-equivalence of two semistable degree-zero systems")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_s_equiv)

    p = sub.add_parser("betti-locus", help="fixed Levi monodromy membership")
    p.add_argument("point")
    p.add_argument("gamma")
    p.add_argument("M")
    p.add_argument("--strict-equality", action="store_true")
    p.set_defaults(func=cmd_betti)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FiltlocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
