"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 precision error, 3 budget exhausted or
inconclusive, 4 internal identity violation.
"""

import argparse
import csv
import io
import json
import sys

from . import __version__
from .dieudonne import CyclicPresentation, from_cyclic, newton_from_module
from .errors import (
    BudgetError,
    CycleNotFoundError,
    InternalCheckError,
    PrecisionError,
    PresentationError,
)
from .invariants import prepare, report, report_minimal
from .newton import (
    NewtonPolygon,
    Nh,
    isogeny_cutoff_bound,
    isomorphism_bound,
    minimal_height_value,
    pqp_bound,
    support_lines,
)
from .sweep import FIELDS, sweep
from .truncated_hom import cross_check, gamma_profile
from .verify import BUDGETS, CHECKS, verify_all
from .witt import ring_create

PSI_SCHEMA = ('{"p": prime, "n": degree (default 1), "N": precision, "c": int, "d": int, '
              '"a": [a_0..a_c], "b": [b_1..b_d]}; a scalar is an integer k (meaning k*1) '
              'or an array of polynomial-basis digits, constant term first')
POLYGON_SCHEMA = '{"segments": [[num, den, mult], ...]} with increasing slopes num/den'


class InputError(Exception):
    pass


def _load_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON ({exc.msg} at position {exc.pos})") from exc


def _read_psi(args):
    if getattr(args, "psi", None) is not None:
        obj = _load_json(args.psi, "--psi")
    elif getattr(args, "psi_file", None) is not None:
        try:
            with open(args.psi_file, encoding="utf-8") as fh:
                obj = _load_json(fh.read(), args.psi_file)
        except OSError as exc:
            raise InputError(f"cannot read {args.psi_file}: {exc.strerror}") from exc
    else:
        return None
    return CyclicPresentation.from_json(obj, N=args.precision)


def _config(args, **extra):
    cfg = {"command": args.command, "precision": args.precision, "budget": args.budget,
           "work_bound": BUDGETS[args.budget]["work_bound"],
           "r_max": BUDGETS[args.budget]["r_max"], "seed": args.seed}
    cfg.update(extra)
    return cfg


def _emit(args, config, payload, text_lines=None, csv_rows=None, csv_fields=None):
    fmt = args.format
    out = sys.stdout
    if fmt == "json":
        out.write(json.dumps({"config": config, "result": payload}, indent=2, sort_keys=True))
        out.write("\n")
        return
    for key in sorted(config):
        out.write(f"# {key}: {json.dumps(config[key])}\n")
    if fmt == "csv":
        buf = io.StringIO()
        if csv_rows is None:
            csv_fields = ["key", "value"]
            csv_rows = [{"key": k, "value": v if isinstance(v, str) else json.dumps(v)}
                        for k, v in sorted(payload.items())]
        w = csv.DictWriter(buf, fieldnames=csv_fields, lineterminator="\n")
        w.writeheader()
        for row in csv_rows:
            w.writerow(row)
        out.write(buf.getvalue())
        return
    for line in text_lines if text_lines is not None else _text(payload):
        out.write(line + "\n")


def _text(payload, indent=""):
    lines = []
    for key, val in payload.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.extend(_text(val, indent + "  "))
        else:
            lines.append(f"{indent}{key}: {json.dumps(val) if isinstance(val, (list, bool)) or val is None else val}")
    return lines


# -- subcommands -------------------------------------------------------------------


def cmd_invariants(args):
    if args.minimal is not None:
        cj, dj, mult = args.minimal
        N = args.precision or 8
        rep = report_minimal(ring_create(args.p, args.n, N), cj, dj, mult)
        config = _config(args, p=args.p, n=args.n, N=N, input={"minimal": [cj, dj, mult]})
    else:
        psi = _read_psi(args)
        if psi is None:
            raise InputError("give --psi, --psi-file or --minimal")
        strict = args.precision is not None
        given_N = psi.ring.N
        psi = prepare(psi, strict=strict)
        rep = report(psi, strict=strict)
        config = _config(args, p=psi.ring.p, n=psi.ring.n, N=given_N, N_working=psi.ring.N,
                         input=psi.describe())
    payload = rep.to_json()
    payload["polygon_breakpoints"] = str(rep.polygon)
    _emit(args, config, payload)
    return 0


def cmd_newton(args):
    psi = _read_psi(args)
    if psi is not None:
        nu = psi.newton()
        config = _config(args, p=psi.ring.p, n=psi.ring.n, N=psi.ring.N, input=psi.describe())
    elif args.polygon is not None:
        nu = NewtonPolygon.from_json(_load_json(args.polygon, "--polygon"))
        config = _config(args, input=args.polygon)
    else:
        raise InputError("give --psi, --psi-file or --polygon")
    payload = {"polygon": nu.to_json(), "breakpoints": str(nu), "h": nu.h, "c": nu.c, "d": nu.d,
               "isoclinic": nu.is_isoclinic(), "binilpotent": nu.is_binilpotent(),
               "ordinary": nu.is_ordinary(), "Nh": Nh(nu.h)}
    if nu.h:
        payload["nu_c"] = str(nu(nu.c))
        payload["j_nu"] = isogeny_cutoff_bound(nu)
        payload["isomorphism_bound"] = isomorphism_bound(nu)
        payload["minimal_height_value"] = minimal_height_value(nu)
        payload["support_lines"] = [{"slope": str(L.slope), "beta": str(L.beta)}
                                    for L in support_lines(nu)]
    if nu.c == nu.d and nu.d > 0:
        payload["pqp_bound"] = pqp_bound(nu)
    if psi is not None and args.check_module:
        other = newton_from_module(from_cyclic(prepare(psi)))
        payload["module_route"] = str(other)
        if other != nu:
            raise InternalCheckError(f"polygon routes disagree: {nu} vs {other}")
    _emit(args, config, payload)
    return 0


def cmd_verify(args):
    only = None
    if args.only:
        only = [name for chunk in args.only for name in chunk.split(",") if name]
        for name in only:
            if name not in CHECKS:
                raise InputError(f"--only: unknown check '{name}'; choose from {', '.join(CHECKS)}")
    results = verify_all(only, budget=args.budget, seed=args.seed)
    config = _config(args, only=only)
    payload = {"checks": [r.to_json() for r in results]}
    _emit(args, config, payload, text_lines=[r.line() for r in results],
          csv_rows=[r.to_json() for r in results],
          csv_fields=["name", "criterion", "status", "detail"])
    if any(r.status == "fail" for r in results):
        return 1
    if any(r.status == "inconclusive" for r in results):
        return 3
    return 0


def cmd_sweep(args):
    rows = sweep(p=args.p, n=args.n, h_max=args.h_max, max_val=args.max_val, N=args.precision)
    config = _config(args, p=args.p, n=args.n, h_max=args.h_max, max_val=args.max_val)
    text = [",".join(FIELDS)] + [",".join("" if r[f] is None else str(r[f]) for f in FIELDS)
                                 for r in rows]
    _emit(args, config, {"rows": rows}, text_lines=text, csv_rows=rows, csv_fields=FIELDS)
    return 0


def cmd_gamma(args):
    psi = _read_psi(args)
    if psi is None:
        raise InputError("give --psi or --psi-file")
    cfg = BUDGETS[args.budget]
    r_max = args.r_max or cfg["r_max"]
    config = _config(args, p=psi.ring.p, n=psi.ring.n, N=psi.ring.N, input=psi.describe(),
                     m_max=args.m_max)
    config["r_max"] = r_max
    if args.cross_check:
        verdict = cross_check(psi, m_max=args.m_max, r_max=r_max, work_bound=cfg["work_bound"])
        payload = verdict.to_json()
        rows = verdict.profile.rows() if verdict.profile else []
        _emit(args, config, payload,
              csv_rows=[{"m": m, "r": r, "log_count": v} for m, r, v in rows],
              csv_fields=["m", "r", "log_count"],
              text_lines=[f"status: {verdict.status}", f"f_detected: {verdict.f_detected}",
                          f"ell: {verdict.ell}"] + ([f"reason: {verdict.reason}"] if verdict.reason else []))
        return 0 if verdict.status == "agree" else (3 if verdict.status == "inconclusive" else 4)
    target = None
    if args.target is not None:
        target = CyclicPresentation.from_json(_load_json(args.target, "--target"), N=args.precision)
    prof = gamma_profile(psi, target, m_max=args.m_max or 3, r_max=r_max,
                         work_bound=cfg["work_bound"])
    text = ["m,r,log_count"] + [f"{m},{r},{v}" for m, r, v in prof.rows()]
    text += [f"gamma({m}) = {g}{'' if prof.stable[m] else ' (unstable)'}"
             for m, g in prof.gamma.items()]
    text.append(f"f_detected: {prof.f_detected}")
    _emit(args, config, prof.to_json(), text_lines=text,
          csv_rows=[{"m": m, "r": r, "log_count": v} for m, r, v in prof.rows()],
          csv_fields=["m", "r", "log_count"])
    return 0


# -- parser ------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help="working precision N; enforced strictly (no automatic increase)")
    common.add_argument("--budget", choices=sorted(BUDGETS), default="default",
                        help="work budget for point-count experiments")
    common.add_argument("--format", choices=["json", "csv", "text"], default=None,
                        help="output format (default: csv for sweep, text otherwise)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    psi_args = argparse.ArgumentParser(add_help=False)
    psi_args.add_argument("--psi", help=f"presentation JSON: {PSI_SCHEMA}")
    psi_args.add_argument("--psi-file", help="file holding presentation JSON")

    parser = argparse.ArgumentParser(
        prog="pdivisible",
        description="Invariants of Dieudonne modules over finite fields.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", parents=[common, psi_args],
                       help="invariant report for a cyclic presentation or a minimal module")
    p.add_argument("--minimal", nargs=3, type=int, metavar=("CJ", "DJ", "MULT"),
                   help="use the minimal module of slope DJ/(CJ+DJ), MULT copies")
    p.add_argument("--p", type=int, default=2, help="prime for --minimal")
    p.add_argument("--n", type=int, default=1, help="residue degree for --minimal")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("newton", parents=[common, psi_args], help="Newton polygon and bounds")
    p.add_argument("--polygon", help=f"polygon JSON: {POLYGON_SCHEMA}")
    p.add_argument("--check-module", action="store_true",
                   help="also compute the polygon from the characteristic polynomial of F")
    p.set_defaults(func=cmd_newton)

    p = sub.add_parser("verify", aliases=["verify-paper"], parents=[common],
                       help="run the pinned verification suite")
    p.add_argument("--only", action="append", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="enumerate small presentations")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--h-max", type=int, default=5)
    p.add_argument("--max-val", type=int, default=2,
                   help="free coefficients range over 0 and p^1..p^max-val")
    p.set_defaults(func=cmd_sweep, format=None)

    p = sub.add_parser("gamma", parents=[common, psi_args],
                       help="point-count profile of truncated homomorphisms")
    p.add_argument("--target", help="target presentation JSON (default: same as --psi)")
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--r-max", type=int, default=None)
    p.add_argument("--cross-check", action="store_true",
                   help="compare the detected f with the level torsion")
    p.set_defaults(func=cmd_gamma)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "sweep" else "text"
    try:
        return args.func(args)
    except (InputError, PresentationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PrecisionError as exc:
        hint = f" (try --precision {exc.suggested_N})" if exc.suggested_N else ""
        print(f"precision error: {exc}{hint}", file=sys.stderr)
        return 2
    except (BudgetError, CycleNotFoundError) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
