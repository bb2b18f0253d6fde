"""Command-line front end.

Subcommands::

    fixcert table EXAMPLE [--n N] [--m M] [--format text|csv|json] [--out FILE]
    fixcert run TARGET [--max-iters K] [--tol TOL] [--m M] [--format csv|json]
                       [--out DIR] [--certify] [--seed S]
    fixcert verify [--seed S] [--count C] [--format text|json] [--out FILE]
    fixcert check-metric FILE

``run`` exit codes: 0 certified (or exact fixed point), 1 no certificate
yet (window never filled), 2 violated at exit, 3 hypothesis error,
4 unreadable or malformed input.
"""

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .equivalence import FiniteInstance, run_suite
from .errors import FormatError, HypothesisError, RectangularTailUnsupported
from .gallery import Example, example_names, get_example
from .metric import FiniteMetric, report_json, validate
from .picard import (CERTIFIED, FIXED_POINT, VIOLATED, Certificate, apriori_tail_bound,
                     certificate, iterate, run_monitor)
from .report import orbit_rows, text_table, write_csv

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATED = 2
EXIT_HYPOTHESIS = 3
EXIT_IO = 4

DEFAULT_SEED = 7


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _nonneg_float(text):
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _default_seed():
    env = os.environ.get("FIXCERT_SEED")
    return int(env) if env else DEFAULT_SEED


@dataclass(frozen=True)
class RunConfig:
    target: str
    max_iters: int = 100
    step_tol: float = 0.0
    m: int = 3
    fmt: str = "csv"
    seed: int = DEFAULT_SEED
    out: str = "."
    certify: bool = False


def _dump(doc):
    return json.dumps(doc, indent=2) + "\n"


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_table(args):
    ex = get_example(args.example)
    orbit = iterate(ex.S, ex.T, ex.x0, max_iters=args.n)
    rows = orbit_rows(orbit, args.m, ex.z_star)
    if args.format == "json":
        text = _dump({"example": ex.name, "m": args.m, "rows": rows})
    elif args.format == "csv":
        buf = io.StringIO()
        write_csv(rows, buf, rounded=True)
        text = buf.getvalue()
    else:
        text = text_table(rows)
    _emit(text, args.out)
    return EXIT_OK


def _resolve_target(target):
    """Registry example, or a finite instance JSON file."""
    try:
        return get_example(target), target
    except KeyError:
        pass
    inst = FiniteInstance.load(target)
    ex = Example(inst.name, inst.S_map(), inst.T_map(), inst.x0, Q=inst.uniform_q, N=1)
    return ex, Path(target).stem


def _violated_certificate(state, orbit):
    q = state.q_hat
    bound = None if q is None else q / (1 - q) * float(orbit.step_dists[state.anchor])
    return Certificate(state.anchor, state.m, q, bound, "violated-at", state.checked_through,
                       "conditional a posteriori estimate, re-estimated after violation",
                       dict(orbit.hypotheses), violated_at=state.violations[-1])


def cmd_run(cfg):
    try:
        ex, stem = _resolve_target(cfg.target)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    orbit = iterate(ex.S, ex.T, ex.x0, max_iters=cfg.max_iters, step_tol=cfg.step_tol)
    traj = run_monitor(orbit, cfg.m)
    state = traj[-1]
    outdir = Path(cfg.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        rows = orbit_rows(orbit, cfg.m, ex.z_star)
        orbit_path = outdir / f"{stem}.orbit.{cfg.fmt}"
        with open(orbit_path, "w", newline="") as fh:
            if cfg.fmt == "json":
                fh.write(_dump({"stop_reason": orbit.stop_reason, "rows": rows}))
            else:
                write_csv(rows, fh)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    if orbit.space.rectangular:
        if cfg.certify:
            print(f"error: {RectangularTailUnsupported.code}", file=sys.stderr)
            return EXIT_HYPOTHESIS
        print(f"orbit: {orbit.last} steps, {orbit.stop_reason}; certificate skipped "
              f"({RectangularTailUnsupported.code})")
        return EXIT_OK

    try:
        tail = None
        if getattr(ex, "Q", None) is not None and orbit.last >= ex.N + 1:
            tail = apriori_tail_bound(orbit, ex.N, ex.Q)
        if state.phase in (CERTIFIED, FIXED_POINT):
            cert, code = certificate(state, orbit, tail), EXIT_OK
        elif state.phase == VIOLATED:
            cert, code = _violated_certificate(state, orbit), EXIT_VIOLATED
        else:
            cert, code = None, EXIT_INVALID
    except HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS

    doc = cert.to_json() if cert is not None else {"status": "estimating", "m": cfg.m}
    doc["stop_reason"] = orbit.stop_reason
    doc["exact_fixed_point"] = orbit.exact_fixed_point
    doc["steps"] = orbit.last
    doc["seed"] = cfg.seed
    try:
        with open(outdir / f"{stem}.certificate.json", "w") as fh:
            fh.write(_dump(doc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    summary = doc.get("status")
    bound = doc.get("bound")
    print(f"orbit: {orbit.last} steps, {orbit.stop_reason}; certificate: {summary}"
          + (f", bound {bound!r} at anchor {doc['anchor']}" if bound is not None else ""))
    return code


def cmd_verify(args):
    suite = run_suite(seed=args.seed, count=args.count)
    doc = suite.to_json()
    if args.out:
        _emit(_dump(doc), args.out)
    if args.format == "json":
        sys.stdout.write(_dump(doc))
    else:
        print(f"instances: {doc['instances']}, passes: {doc['passes']}, "
              f"failures: {len(doc['failures'])}, master seed {doc['master_seed']}")
        for k, v in doc["directions"].items():
            print(f"  {k}: {v['pass']} pass, {v['vacuous']} vacuous, {v['fail']} fail")
        print(f"  injectivity counterexample: {suite.counterexample.verdict}")
    return EXIT_OK if suite.passed else EXIT_INVALID


def cmd_check_metric(args):
    try:
        fm = FiniteMetric.load(args.file)
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    violations = validate(fm)
    sys.stdout.write(_dump(report_json(violations)))
    return EXIT_OK if not violations else EXIT_INVALID


def build_parser():
    p = argparse.ArgumentParser(prog="fixcert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="orbit diagnostics table for a registered example")
    t.add_argument("example", help=f"one of: {', '.join(example_names())}")
    t.add_argument("--n", type=_positive_int, default=10)
    t.add_argument("--m", type=_positive_int, default=3)
    t.add_argument("--format", choices=("text", "csv", "json"), default="text")
    t.add_argument("--out", default=None)

    r = sub.add_parser("run", help="iterate, monitor and write orbit + certificate")
    r.add_argument("target", help="example name or finite instance JSON file")
    r.add_argument("--max-iters", type=_positive_int, default=100)
    r.add_argument("--tol", type=_nonneg_float, default=0.0)
    r.add_argument("--m", type=_positive_int, default=3)
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--out", default=".")
    r.add_argument("--seed", type=int, default=None,
                   help="recorded in the certificate; runs themselves are deterministic")
    r.add_argument("--certify", action="store_true",
                   help="exit 3 instead of skipping the certificate on a rectangular metric")

    v = sub.add_parser("verify", help="randomized class-equivalence suite")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--count", type=_positive_int, default=100)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--out", default=None)

    c = sub.add_parser("check-metric", help="validate a finite metric JSON file")
    c.add_argument("file")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    if args.command == "table":
        if args.example not in example_names():
            parser.error(f"unknown example {args.example!r}")
        return cmd_table(args)
    if args.command == "run":
        cfg = RunConfig(args.target, args.max_iters, args.tol, args.m, args.format,
                        args.seed, args.out, args.certify)
        return cmd_run(cfg)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_check_metric(args)


if __name__ == "__main__":
    sys.exit(main())
