"""``fredblock`` command line.

Exit codes: 0 success, 1 unreadable input or bad flags, 2 a constructor
precondition failed (the failed clause goes to stderr), 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import __version__
from ._validation import check_lambda, check_schedule
from .blockmodel import SCHEMA
from .characterization import Theorem, Theorem2, check, check_n2_equiv, profile_of
from .classify import classify, spectra_of
from .completion import DEFAULT_SCHEDULE, TARGETS, certify, complete, prediction_from_json
from .deltasets import DEFAULT_GRID_CAP, Grid, Target, legacy_diff, region_scan, sandwich_violations
from .exceptions import FredblockError, PreconditionFailed, ResourceCap, SchemaError, Unsupported
from .io import dumps, load_json, load_model, load_operator, load_tuple
from .opmodel import fredholm_data
from .oracle import rank_reports

# values that may legitimately start with "-" and would otherwise look like flags
_VALUE_FLAGS = ("--lambda", "--grid", "--grid-im")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _glue(argv: List[str]) -> List[str]:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _lam(args):
    if args.lam is None:
        raise SchemaError("--lambda is required")
    return check_lambda(args.lam)


def _grid(args) -> Grid:
    if args.grid is None:
        raise SchemaError("--grid is required")
    return Grid.parse(args.grid, args.grid_im)


def _cmd_fred_data(args) -> str:
    lam = _lam(args)
    return dumps(fredholm_data(load_operator(args.op), lam).to_json())


def _cmd_classify(args) -> str:
    data = fredholm_data(load_operator(args.op), _lam(args))
    return dumps({"schema": SCHEMA, "data": data.to_json(), "class": classify(data).to_json(),
                  "spectra": spectra_of(data).to_json()})


def _cmd_theorem_check(args) -> str:
    diag = load_tuple(args.tuple)
    lam = _lam(args)
    profile = profile_of(diag, lam)
    names = [args.theorem] if args.theorem else [t.value for t in Theorem]
    verdicts = []
    for name in names:
        if name in Theorem2.__members__:
            if len(profile) != 2:
                raise SchemaError(f"{name} needs a tuple of length 2")
            verdicts.append({"theorem": name, "holds": check_n2_equiv(profile, name)})
        elif name in Theorem.__members__:
            verdicts.append(check(profile, name).to_json())
        else:
            raise SchemaError(f"unknown theorem {name!r}")
    if args.theorem is None and len(profile) == 2:
        verdicts += [{"theorem": t.value, "holds": check_n2_equiv(profile, t)} for t in Theorem2]
    return dumps({"schema": SCHEMA, "lambda": lam.to_pair(), "verdicts": verdicts})


def _cmd_complete(args) -> str:
    if args.target not in TARGETS:
        raise SchemaError(f"--target must be one of {', '.join(TARGETS)}")
    plan = complete(load_tuple(args.tuple), _lam(args), args.target, chain=args.chain)
    return plan.model.dumps(prediction=plan.to_json()) + "\n"


def _target(args) -> Target:
    name = args.target or "AW_sep"
    try:
        return Target(name)
    except ValueError:
        raise SchemaError(f"--target must be one of {', '.join(t.value for t in Target)}") from None


def _cmd_scan(args) -> str:
    scan = region_scan(load_tuple(args.tuple), _grid(args), _target(args), cap=args.cap, n_jobs=args.n_jobs)
    if args.format == "json":
        return dumps({"schema": SCHEMA, **scan.to_json()})
    return scan.to_csv()


def _cmd_verify(args) -> str:
    doc = load_json(args.model)
    model = load_model(args.model)
    schedule = check_schedule(args.schedule) if args.schedule else DEFAULT_SCHEDULE
    out = {"schema": SCHEMA, "schedule": list(schedule),
           "reports": [r.to_json() for r in rank_reports(model, schedule, n_jobs=args.n_jobs)]}
    pred = doc.get("prediction") if isinstance(doc, dict) else None
    if pred is not None:
        try:
            predicted = prediction_from_json(pred.get("predicted", pred))
        except (AttributeError, ValueError) as exc:
            raise SchemaError(str(exc)) from exc
        out["certificate"] = certify(model, predicted, schedule, n_jobs=args.n_jobs)
    return dumps(out)


def _cmd_sandwich(args) -> str:
    targets = [_target(args)] if args.target else list(Target)
    bad = sandwich_violations(load_tuple(args.tuple), _grid(args), targets, cap=args.cap)
    return dumps({"schema": SCHEMA, "targets": [t.value for t in targets], "violations": bad})


def _cmd_legacy(args) -> str:
    rows = legacy_diff(load_tuple(args.tuple), _grid(args), _target(args), cap=args.cap)
    if args.format == "csv":
        lines = ["re,im,flag,corrected_lower,corrected_upper,legacy"]
        lines += [",".join(str(r[k]) for k in ("re", "im", "flag", "corrected_lower", "corrected_upper", "legacy"))
                  for r in rows]
        return "\n".join(lines) + "\n"
    return dumps({"schema": SCHEMA, "target": _target(args).value, "rows": rows})


COMMANDS = {
    "fred-data": (_cmd_fred_data, "Fredholm data of one operator at lambda"),
    "classify": (_cmd_classify, "Fredholm classes and spectra membership"),
    "theorem-check": (_cmd_theorem_check, "evaluate the existence theorems on a tuple"),
    "complete": (_cmd_complete, "build a witness upper tuple as a model file"),
    "scan": (_cmd_scan, "delta-set memberships over a rational grid"),
    "verify": (_cmd_verify, "exact truncation ranks of a model file"),
    "sandwich-check": (_cmd_sandwich, "lower/upper bound inclusion violations on a grid"),
    "legacy-diff": (_cmd_legacy, "points where the uncorrected formula disagrees"),
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fredblock", description="Completions and spectra of upper triangular operator matrices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        s = sub.add_parser(name, help=help_text)
        if name in ("fred-data", "classify"):
            s.add_argument("--op", required=True, help="operator JSON file")
        elif name == "verify":
            s.add_argument("--model", required=True, help="model JSON file (as written by complete)")
            s.add_argument("--schedule", help="comma separated window sizes, default 16,32,64,128")
        else:
            s.add_argument("--tuple", required=True, help="diagonal tuple JSON file")
        if name in ("fred-data", "classify", "theorem-check", "complete"):
            s.add_argument("--lambda", dest="lam", help='"p/q" or "p/q,p/q" (real, imaginary)')
        if name in ("scan", "sandwich-check", "legacy-diff"):
            s.add_argument("--grid", help="real axis as A..B:S; also used for the imaginary axis by default")
            s.add_argument("--grid-im", help="imaginary axis as A..B:S")
            s.add_argument("--target", help="delta-set target such as AW_sep (default AW_sep)")
            s.add_argument("--cap", type=int, default=DEFAULT_GRID_CAP, help="maximum number of grid points")
        if name == "theorem-check":
            s.add_argument("--theorem", help="theorem name; all of them when omitted")
        if name == "complete":
            s.add_argument("--target", required=True, choices=TARGETS)
            s.add_argument("--chain", action="store_true", help="use the chain theorems instead of the separable ones")
        if name in ("scan", "legacy-diff"):
            s.add_argument("--format", choices=("csv", "json"), default="csv" if name == "scan" else "json")
        if name in ("scan", "verify"):
            s.add_argument("--n-jobs", type=int, default=None)
        s.add_argument("--out", help="write here instead of stdout")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_glue(argv))
    handler = COMMANDS[args.command][0]
    try:
        _emit(handler(args), args.out)
    except PreconditionFailed as exc:
        print(f"precondition failed: {exc.clause}", file=sys.stderr)
        return 2
    except Unsupported as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 2
    except ResourceCap as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except (SchemaError, ValueError, KeyError, FredblockError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
