"""Command-line interface.

Subcommands: catalog | verify-case | search-metric | crosscheck | scan.
Exit codes: 0 all checks pass, 1 check failure, 2 structural/config error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .report import RunConfig


def _add_common(p):
    p.add_argument("--config", help="JSON config file (space/metric/scan/oracle)")
    p.add_argument("--seed", type=int, help="random seed override")
    p.add_argument("--samples", type=int, help="flag sample budget override")
    p.add_argument("--json", action="store_true", help="emit JSON to stdout")
    p.add_argument("--out", help="output directory for report, CSV and figures")


def _add_case_flags(p):
    p.add_argument("--case", type=int, help="catalog case id")
    p.add_argument("--n", type=int, help="family size parameter")
    p.add_argument("--k", type=int, help="torus parameter k (case 6)")
    p.add_argument("--l", type=int, help="torus parameter l (case 6)")
    p.add_argument("--negative-control", action="store_true",
                   help="allow running an explicitly inadmissible zero-flag control")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="finslerhom",
        description="Curvature engine for invariant (alpha,beta)-metrics on "
                    "compact homogeneous spaces")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the classification cases")
    p.add_argument("--json", action="store_true")

    for name, doc in (("verify-case", "run all checks for one case"),
                      ("search-metric", "search block scalars for positive curvature"),
                      ("scan", "sample flag and S-curvature distributions")):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        _add_case_flags(p)

    p = sub.add_parser("crosscheck", help="run the oracle cross-check suites")
    _add_common(p)
    return ap


def load_config(args):
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "case", None) is not None:
        cfg.space.case = args.case
    for attr in ("n", "k", "l"):
        if getattr(args, attr, None) is not None:
            setattr(cfg.space, attr, getattr(args, attr))
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "samples", None) is not None:
        cfg.scan.flag_samples = args.samples
    if getattr(args, "negative_control", False):
        cfg.negative_control = True
    if getattr(args, "out", None):
        cfg.out = args.out
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            rows = harness.cmd_catalog()
            if args.json:
                print(json.dumps(rows, indent=2))
            else:
                for r in rows:
                    mark = "admissible" if r["admissible"] else "excluded  "
                    print(f"({r['id']:2d}) [{mark}] {r['pair']}")
                    print(f"      {r['spaces']}")
                    if r["parameters"]:
                        print(f"      parameters: {r['parameters']}")
                    if r["exclusion"]:
                        print(f"      exclusion: {r['exclusion']}")
            return 0

        if args.command == "verify-case":
            cfg = load_config(args)
            rep = harness.cmd_verify_case(cfg)
            print(rep.to_json() if args.json else rep.to_text())
            return 0 if rep.all_passed else 1

        if args.command == "search-metric":
            cfg = load_config(args)
            best, rep = harness.cmd_search_metric(cfg)
            print(rep.to_json() if args.json else rep.to_text())
            return 0 if (best is not None and rep.all_passed) else 1

        if args.command == "crosscheck":
            cfg = load_config(args)
            res = harness.cmd_crosscheck(cfg)
            if args.json:
                print(json.dumps(res, indent=2))
            else:
                for k, v in res.items():
                    flag = "ok  " if v < 1e-6 else "HIGH"
                    print(f"  [{flag}] {k:28s} {v:.3e}")
            return 0 if all(v < 1e-6 for v in res.values()) else 1

        if args.command == "scan":
            cfg = load_config(args)
            rep = harness.cmd_scan(cfg)
            print(rep.to_json() if args.json else rep.to_text())
            return 0
    except harness.StructuralRejection as e:
        print(f"structural rejection: {e}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FileNotFoundError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
