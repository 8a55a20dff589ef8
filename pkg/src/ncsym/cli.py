"""Command-line front end.

    ncsym express "z*w*z + w*z*w" --generators "z + w; z*w + w*z" --degree-bound 3
    ncsym pipeline --seed 1 --levels 1,2,3 --tol.kernel 1e-9
    ncsym suite --seed 0 --only 1,2,9

Exit codes: 0 pass, 2 usage or parse error, 3 infeasible answer,
4 numerical stage failure.  Reports are JSON with sorted keys, so equal
inputs give byte-identical output.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import battery, freepoly, mat, realize
from .errors import InvalidInputError, NcSymError, ParseError, StageError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_STAGE = 4

DEFAULT_GENERATORS = "z + w; z*w + w*z"
DEFAULT_LEVELS = (1, 2, 3)
HOLDOUT_TOL = 1e-6
SEED_ENV = "NCSYM_SEED"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    levels: tuple = DEFAULT_LEVELS
    output_path: str = None
    k_half_dim: int = 2

    def stage_tol(self, name):
        default = HOLDOUT_TOL if name == "holdout" else realize.STAGE_TOL
        return self.tolerances.get(name, default)


# -- commands ---------------------------------------------------------------

def split_generators(text):
    parts = [p.strip() for p in text.split(";")]
    if not all(parts):
        raise UsageError("empty generator in --generators")
    return parts


def cmd_express(poly_text, generators_text, degree_bound):
    """Decide expressibility; returns ``(exit_code, report)``."""
    try:
        target = freepoly.parse(poly_text)
        gens = [freepoly.parse(g, d=target.d) for g in split_generators(generators_text)]
    except ParseError as exc:
        return EXIT_USAGE, {"command": "express", "error": str(exc),
                            "line": exc.line, "column": exc.column}
    res = freepoly.expressibility(target, gens, degree_bound)
    report = {"command": "express", "target": freepoly.format_poly(target),
              "generators": [freepoly.format_poly(g) for g in gens],
              "degree_bound": degree_bound}
    report.update(res.to_json())
    if res.expressible:
        terms = (_format_term(idx, c) for idx, c in res.coefficients.items())
        report["decomposition"] = " + ".join(terms)
    return (EXIT_OK if res.expressible else EXIT_INFEASIBLE), report


def _format_term(idx, c):
    prod = "*".join(f"g{i + 1}" for i in idx) or "1"
    coeff = f"{c.real:g}" if c.imag == 0 else f"({c.real:g},{c.imag:g})"
    return f"{coeff}*{prod}"


def cmd_pipeline(config):
    """Generate an instance, realize it and verify on held-out points."""
    inst, r, ver = battery.pipeline_run(config.seed, config.k_half_dim, config.levels,
                                        tolerances=config.tolerances)
    report = realize.report_json(r, verify=ver)
    report.update({"command": "pipeline", "seed": config.seed, "levels": list(config.levels),
                   "k_half_dim": config.k_half_dim})
    report["redheffer_route"] = max(
        mat.op_norm(realize.redheffer_value(r, x) - inst.phi(x)) for x in inst.model.holdout)
    failed = [s.name for s in r.stages if not s.passed]
    if ver["holdout"] > config.stage_tol("holdout"):
        failed.append("holdout")
    report["failed_stages"] = failed
    return (EXIT_STAGE if failed else EXIT_OK), report


def cmd_suite(config, selection=None, sweep=0):
    """Run the acceptance battery (and optionally a pipeline seed sweep)."""
    if selection is not None and not selection:
        raise UsageError("empty battery selection")
    unknown = [i for i in (selection or []) if i not in battery.CRITERIA]
    if unknown:
        raise UsageError(f"unknown criteria: {unknown}")
    results = battery.run(selection, seed=config.seed)
    report = {"command": "suite", "seed": config.seed,
              "criteria": [c.to_json() for c in results],
              "passed": sum(c.passed for c in results),
              "failed": sum(not c.passed for c in results)}
    ok = report["failed"] == 0
    if sweep:
        table = []
        for s in range(config.seed, config.seed + sweep):
            _, r, ver = battery.pipeline_run(s, config.k_half_dim, config.levels,
                                             tolerances=config.tolerances)
            row = {"seed": s, "stages": {st.name: st.residual for st in r.stages},
                   "holdout": ver["holdout"]}
            row["pass"] = all(st.passed for st in r.stages) and ver["holdout"] <= HOLDOUT_TOL
            ok &= row["pass"]
            table.append(row)
        report["sweep"] = table
    return (EXIT_OK if ok else EXIT_STAGE), report


# -- argument handling --------------------------------------------------------

def _parse_levels(text):
    try:
        levels = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise UsageError(f"bad --levels {text!r}")
    if not levels or min(levels) < 1:
        raise UsageError("--levels needs positive integers")
    return levels


def _parse_selection(text):
    if text is None:
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --only {text!r}")


def _parse_tolerances(extra):
    """``--tol.<stage> VALUE`` or ``--tol.<stage>=VALUE`` pairs left over by argparse."""
    known = set(realize.STAGES) | {"holdout"}
    tols = {}
    i = 0
    while i < len(extra):
        arg = extra[i]
        if not arg.startswith("--tol."):
            raise UsageError(f"unrecognized argument {arg!r}")
        name, eq, value = arg[len("--tol."):].partition("=")
        if not eq:
            if i + 1 >= len(extra):
                raise UsageError(f"{arg} needs a value")
            value = extra[i + 1]
            i += 1
        if name not in known:
            raise UsageError(f"unknown stage {name!r}; known: {', '.join(sorted(known))}")
        try:
            tols[name] = float(value)
        except ValueError:
            raise UsageError(f"bad tolerance {value!r} for stage {name}")
        if not tols[name] > 0:
            raise UsageError(f"tolerance for {name} must be > 0")
        i += 1
    return tols


def _resolve_seed(flag):
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"master seed (falls back to ${SEED_ENV}, then 0)")
    common.add_argument("--out", help="also write the JSON report to this file")
    common.add_argument("--json", action="store_true", help="print the JSON report")

    parser = argparse.ArgumentParser(prog="ncsym", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("express", parents=[common],
                        help="is a polynomial a polynomial in given generators?")
    ex.add_argument("poly")
    ex.add_argument("--generators", default=DEFAULT_GENERATORS,
                    help="';'-separated generator polynomials")
    ex.add_argument("--degree-bound", type=int, default=None,
                    help="max total degree (default: degree of the target)")

    pipe = sub.add_parser("pipeline", parents=[common],
                          help="realize a generated symmetric function; --tol.<stage> VALUE")
    pipe.add_argument("--levels", default="1,2,3")
    pipe.add_argument("--k-half-dim", type=int, default=2)

    suite = sub.add_parser("suite", parents=[common], help="run the acceptance battery")
    suite.add_argument("--only", default=None, help="comma-separated criterion numbers")
    suite.add_argument("--sweep", type=int, default=0, help="pipeline seed sweep length")
    suite.add_argument("--levels", default="1,2,3")
    suite.add_argument("--k-half-dim", type=int, default=2)
    return parser


def _emit(report, args, text):
    blob = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(blob)
    sys.stdout.write(blob if args.json else text + "\n")


def _summary(code, report):
    cmd = report.get("command")
    if "error" in report:
        return f"error: {report['error']}"
    if cmd == "express":
        if code == EXIT_OK:
            return f"expressible: {report['decomposition']}  (residual {report['residual']:.3e})"
        return f"not expressible (least-squares residual {report['residual']:.6g})"
    if cmd == "pipeline":
        lines = [f"{s['name']:>12}  {s['residual']:.3e}  {'ok' if s['pass'] else 'FAIL'}"
                 for s in report["stages"]]
        lines.append(f"{'fit':>12}  {report['verify']['fit']:.3e}")
        lines.append(f"{'holdout':>12}  {report['verify']['holdout']:.3e}")
        return "\n".join(lines)
    lines = [f"[{'PASS' if c['pass'] else 'FAIL'}] criterion {c['criterion']:2d} {c['name']}"
             for c in report["criteria"]]
    for row in report.get("sweep", []):
        lines.append(f"seed {row['seed']}: holdout {row['holdout']:.3e} "
                     f"{'PASS' if row['pass'] else 'FAIL'}")
    lines.append(f"{report['passed']} passed, {report['failed']} failed")
    return "\n".join(lines)


def main(argv=None):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        if extra and args.command != "pipeline" and args.command != "suite":
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        tolerances = _parse_tolerances(extra)
        if args.command == "express":
            bound = args.degree_bound
            if bound is None:
                try:
                    bound = freepoly.parse(args.poly).degree
                except ParseError:
                    bound = 0
            code, report = cmd_express(args.poly, args.generators, bound)
        else:
            config = RunConfig(seed=_resolve_seed(args.seed), tolerances=tolerances,
                               levels=_parse_levels(args.levels), output_path=args.out,
                               k_half_dim=args.k_half_dim)
            if config.k_half_dim < 1:
                raise UsageError("--k-half-dim must be >= 1")
            if args.command == "pipeline":
                code, report = cmd_pipeline(config)
            else:
                code, report = cmd_suite(config, _parse_selection(args.only), args.sweep)
    except (UsageError, InvalidInputError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"ncsym: error: {exc}\n")
        return EXIT_USAGE
    except StageError as exc:
        report = {"command": args.command, "error": str(exc), "stage": exc.stage}
        code = EXIT_STAGE
    except NcSymError as exc:
        report = {"command": args.command, "error": str(exc)}
        code = EXIT_STAGE
    _emit(report, args, _summary(code, report))
    return code


if __name__ == "__main__":
    sys.exit(main())
