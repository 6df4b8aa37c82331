"""Run the agreement batteries and print one summary line each.

    python3 scripts/run_suites.py            # quick batteries
    python3 scripts/run_suites.py --full     # add the exhaustive F5 scan (minutes)
    python3 scripts/run_suites.py --jsonl out/   # also write per-battery JSON lines
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from filtloc import experiments as ex
from filtloc.field import QQ, PrimeField


def batteries(full: bool, seed: int):
    yield "pairing-F7", lambda: ex.pairing_battery(PrimeField(7), 200, seed=seed)
    yield "pairing-Q", lambda: ex.pairing_battery(QQ, 50, seed=seed)
    yield "trivial-weights", lambda: ex.trivial_weights_battery()
    yield "s-vs-git", lambda: ex.s_vs_git_battery(seed=seed)
    yield "degree-zero", lambda: ex.degree_zero_battery(200, seed=seed)
    yield "root-datum", lambda: ex.root_datum_battery(100, seed=seed)
    yield "gauge", lambda: ex.gauge_battery(transports=50, seed=seed)
    if full:
        yield "exhaustive-F5", lambda: ex.equivalence_suite(PrimeField(5), 2, 0, ["x1", "x2"], exhaustive=True)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jsonl", type=pathlib.Path)
    args = ap.parse_args(argv)
    ok = True
    for name, run in batteries(args.full, args.seed):
        rep = run()
        ok &= rep.all_agree()
        print(f"{name:16s} {'ok  ' if rep.all_agree() else 'FAIL'} {rep.summary()}", flush=True)
        if args.jsonl:
            args.jsonl.mkdir(parents=True, exist_ok=True)
            (args.jsonl / f"{name}.jsonl").write_text(rep.to_jsonl())
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
