"""Command-line front end.

One subcommand per pipeline, deterministic JSON or CSV artifacts with a
provenance header, and a driver for the acceptance suite.  Exit codes:
0 success, 2 invalid configuration, 3 cap or budget exhausted (partial
results are still written), 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__
from .contfrac import convergents, expand
from .errors import (
    ConfigError,
    InvariantViolation,
    PrecisionExhausted,
    XDAError,
)
from .extrinsic import (
    cantor_oracle,
    extrinsic_search_cantor,
    extrinsic_search_general,
    ifs_oracle,
    psi_census,
    circle_point_from_parameter,
)
from .ifs import (
    Ball2D,
    Interval1D,
    builtin_names,
    builtin_system,
    cantor_level_endpoints,
    check_osc,
    cover,
    line_porosity,
    load_system,
    membership,
    segment_scan,
    verify_membership,
)
from .lattice import (
    certify_progression_entry,
    good_pair_search,
    verify_good_pair,
)
from .rap import longest_ap, longest_rap
from .scalars import QuadScalar
from .targets import (
    DigitStream,
    format_scalar_spec,
    parse_point,
    parse_scalar_spec,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

SCHEMAS = {
    "cf": 1,
    "progression": 1,
    "cantor-dirichlet": 1,
    "circle-census": 1,
}

CSV_COMMANDS = frozenset(SCHEMAS)


# ---------------------------------------------------------------------------
# Configuration plumbing.


@dataclass
class ExperimentConfig:
    """One experiment: a subcommand plus its parameters.

    The hash covers (command, args, seed) via canonical JSON, so it is
    stable under key reordering and independent of output destination.
    """

    command: str
    args: dict = field(default_factory=dict)
    seed: int = 0
    fmt: str = "json"
    output: Optional[str] = None

    def to_json(self) -> dict:
        return {"command": self.command, "args": dict(self.args),
                "seed": self.seed, "format": self.fmt, "output": self.output}

    @classmethod
    def from_json(cls, doc) -> "ExperimentConfig":
        if not isinstance(doc, dict) or not doc.get("command"):
            raise ConfigError("config must be an object with a command")
        args = doc.get("args", {})
        if not isinstance(args, dict):
            raise ConfigError("config args must be an object")
        return cls(doc["command"], dict(args), int(doc.get("seed", 0)),
                   doc.get("format", "json"), doc.get("output"))

    def digest(self) -> str:
        blob = json.dumps(
            {"command": self.command, "args": self.args, "seed": self.seed},
            sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_argv(self) -> list:
        argv = [self.command]
        for key in sorted(self.args):
            value = self.args[key]
            flag = "--" + key.replace("_", "-")
            if value is True:
                argv.append(flag)
            elif value is not None and value is not False:
                argv.extend([flag, str(value)])
        argv.extend(["--seed", str(self.seed), "--format", self.fmt])
        if self.output:
            argv.extend(["--output", self.output])
        return argv


def _config_from_args(args) -> ExperimentConfig:
    skip = {"command", "seed", "format", "output", "workers", "config", "func"}
    payload = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None or callable(value):
            continue
        payload[key] = value
    fmt = args.format or ("csv" if args.command == "cantor-dirichlet" else "json")
    return ExperimentConfig(args.command, payload, args.seed, fmt, args.output)


# ---------------------------------------------------------------------------
# Serialization helpers.


def _enc(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, QuadScalar):
        return format_scalar_spec(value)
    if isinstance(value, DigitStream):
        return value.spec()
    if isinstance(value, (list, tuple)):
        return [_enc(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _enc(v) for k, v in value.items()}
    if hasattr(value, "lo") and hasattr(value, "hi"):
        return {"lo": _enc(value.lo), "hi": _enc(value.hi)}
    raise ConfigError("cannot serialize %r" % type(value).__name__)


def _render_json(config: ExperimentConfig, result: dict) -> str:
    doc = {
        "xda": {
            "version": __version__,
            "command": config.command,
            "config": _enc(config.args),
            "config_hash": config.digest(),
            "seed": config.seed,
        },
        "result": _enc(result),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _render_csv(config: ExperimentConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write("# xda %s command=%s schema=%s/%d config_hash=%s seed=%d\n"
              % (__version__, config.command, config.command,
                 SCHEMAS[config.command], config.digest(), config.seed))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ";".join(str(_csv_cell(v)) for v in value)
    enc = _enc(value)
    if isinstance(enc, dict):
        raise ConfigError("no CSV rendering for %r" % (value,))
    return enc


def _deliver(text: str, config: ExperimentConfig, stdout) -> None:
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


# ---------------------------------------------------------------------------
# Shared argument parsing.


def _parse_system(spec: str):
    if spec.startswith("builtin:"):
        return builtin_system(spec[len("builtin:"):])
    if not os.path.exists(spec):
        raise ConfigError("system %r: not a builtin (try builtin:{%s}) and "
                          "no such file" % (spec, ",".join(builtin_names())))
    with open(spec, "r", encoding="utf-8") as fh:
        return load_system(json.load(fh))


def _parse_exact_point(spec: str) -> tuple:
    point = parse_point(spec)
    coords = []
    for c in point.coords:
        if isinstance(c, DigitStream):
            raise ConfigError("this command needs exact coordinates, "
                              "got stream %r" % c.spec())
        coords.append(c)
    return tuple(coords)


def _parse_region(text: str):
    kind, _, rest = text.partition(":")
    scalars = [parse_scalar_spec(t) for t in rest.split(",") if t.strip()]
    if kind == "interval":
        if len(scalars) != 2:
            raise ConfigError("interval region needs lo,hi")
        return Interval1D(scalars[0], scalars[1])
    if kind == "ball":
        if len(scalars) != 3:
            raise ConfigError("ball region needs cx,cy,r")
        return Ball2D((scalars[0], scalars[1]), scalars[2])
    raise ConfigError("unknown region kind %r (interval or ball)" % kind)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError("bad fraction %r" % text) from None


def _parse_int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError("bad integer list %r" % text) from None


def _verdict_doc(verdict, verified=None) -> dict:
    doc = {
        "status": verdict.status,
        "depth": verdict.depth,
        "prefix": list(verdict.prefix) if verdict.prefix is not None else None,
        "cycle": list(verdict.cycle) if verdict.cycle is not None else None,
        "state": _point_doc(verdict.state) if verdict.state is not None else None,
    }
    if verified is not None:
        doc["verified"] = verified
    return doc


def _point_doc(point):
    if isinstance(point, tuple):
        return [_enc(c) for c in point]
    return [_enc(point)]


# ---------------------------------------------------------------------------
# Subcommand handlers.  Each returns (result, rows, header, exit_code).


def cmd_cf(args):
    x = parse_scalar_spec(args.point)
    exp = expand(x, args.terms, args.max_precision)
    convs = convergents(exp)
    result = {
        "point": args.point,
        "partials": list(exp.partials),
        "convergents": [{"p": p, "q": q} for p, q in convs],
    }
    rows = [(n + 1, exp.partials[n], convs[n][0], convs[n][1])
            for n in range(len(convs))]
    return result, rows, ("n", "partial", "p", "q"), EXIT_OK


def cmd_goodpair(args):
    x = parse_point(args.point)
    pair = good_pair_search(x, args.min_q, max_precision=args.max_precision)
    verified, _checks = verify_good_pair(x, pair)
    if not verified:
        raise InvariantViolation("good pair failed re-verification")
    result = {
        "dim": x.dim,
        "r0": {"p": list(pair.r0.p), "q": pair.r0.q},
        "r_inf": {"p": list(pair.r_inf.p), "q": pair.r_inf.q},
        "height": pair.height,
        "verified": True,
    }
    return result, None, None, EXIT_OK


def cmd_progression(args):
    x = parse_point(args.point)
    pair = good_pair_search(x, args.min_q, max_precision=args.max_precision)
    entries = []
    rows = []
    for i in range(args.i_max + 1):
        r = pair.r0.add_multiple(pair.r_inf, i)
        ok = certify_progression_entry(x, pair, i, args.max_precision)
        entries.append({"i": i, "p": list(r.p), "q": r.q, "certified": ok})
        rows.append((i, list(r.p), r.q, ok))
    result = {
        "dim": x.dim,
        "r0": {"p": list(pair.r0.p), "q": pair.r0.q},
        "r_inf": {"p": list(pair.r_inf.p), "q": pair.r_inf.q},
        "entries": entries,
        "all_certified": all(e["certified"] for e in entries),
    }
    return result, rows, ("i", "p", "q", "certified"), EXIT_OK


def cmd_rap_scan(args):
    if (args.cantor_depth is None) == (args.points is None):
        raise ConfigError("give exactly one of --cantor-depth or --points")
    if args.cantor_depth is not None:
        points = cantor_level_endpoints(args.cantor_depth)
    else:
        with open(args.points, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, list) or not raw:
            raise ConfigError("points file must be a nonempty JSON array")
        points = [tuple(_parse_fraction(str(c)) for c in
                        (entry if isinstance(entry, list) else [entry]))
                  for entry in raw]
    if args.ap:
        chain = longest_ap(points, args.max_len)
        result = {"mode": "ap", "length": len(chain),
                  "chain": [_point_doc(p) for p in chain]}
        return result, None, None, EXIT_OK
    c_bound = _parse_fraction(args.c)
    found = longest_rap(points, c_bound, args.max_len, budget=args.budget)
    chain = found.certificate.points if found.certificate else ()
    result = {
        "mode": "rap",
        "c": str(c_bound),
        "length": len(chain),
        "exhausted": found.exhausted,
        "nodes": found.nodes,
        "chain": [_point_doc(p) for p in chain],
    }
    code = EXIT_OK if found.exhausted else EXIT_BUDGET
    return result, None, None, code


def cmd_osc_check(args):
    system = _parse_system(args.system)
    report = check_osc(system)
    result = {
        "system": system.name,
        "verified": report.verified,
        "violations": [
            {"kind": v.kind, "letters": list(v.letters),
             "witness": _point_doc(v.witness) if v.witness is not None else None}
            for v in report.violations],
    }
    return result, None, None, EXIT_OK


def cmd_cover(args):
    system = _parse_system(args.system)
    region = _parse_region(args.region)
    res = cover(system, region)
    result = {
        "system": system.name,
        "count": len(res.words),
        "words": list(res.strings),
        "gamma": res.gamma,
        "ratios": [r for r in res.ratios],
        "diameter_squared": res.diameter_squared,
    }
    return result, None, None, EXIT_OK


def cmd_member(args):
    system = _parse_system(args.system)
    point = _parse_exact_point(args.point)
    verdict = membership(system, point, depth_cap=args.depth_cap)
    verified = verify_membership(system, point, verdict) if verdict.decided else None
    if verdict.decided and not verified:
        raise InvariantViolation("membership verdict failed re-verification")
    result = {"system": system.name, "point": args.point,
              "verdict": _verdict_doc(verdict, verified)}
    code = EXIT_OK if verdict.decided else EXIT_BUDGET
    return result, None, None, code


def cmd_porosity(args):
    system = _parse_system(args.system)
    anchor = _parse_exact_point(args.anchor)
    direction = _parse_exact_point(args.direction)
    epsilon = _parse_fraction(args.epsilon)
    scales = [_parse_fraction(t) for t in args.scales.split(",") if t.strip()]
    report = line_porosity(system, anchor, direction, epsilon, scales,
                           samples=args.samples, depth_cap=args.depth_cap)
    result = {
        "system": system.name,
        "epsilon": report.epsilon,
        "certified": report.certified,
        "largest_uniform": report.largest_uniform,
        "sites": [{"radius": s.radius, "center": _point_doc(s.center),
                   "depth": s.depth, "gap": s.gap} for s in report.sites],
        "failures": [{"radius": f.radius, "center": _point_doc(f.center)}
                     for f in report.failures],
    }
    return result, None, None, EXIT_OK if report.certified else EXIT_BUDGET


def cmd_segment_scan(args):
    system = _parse_system(args.system)
    min_len = _parse_fraction(args.min_len)
    res = segment_scan(system, args.depth, min_len)
    result = {
        "system": system.name,
        "found": res.found is not None,
        "depth": res.depth,
        "min_length": res.min_length,
        "lines_examined": res.lines_examined,
        "hits": [{"anchor": _point_doc(h.anchor),
                  "direction": _point_doc(h.direction),
                  "t_lo": h.t_lo, "t_hi": h.t_hi,
                  "length_squared": h.length_squared} for h in res.hits],
    }
    return result, None, None, EXIT_OK


def cmd_cantor_dirichlet(args):
    x = parse_point(args.point)
    report = extrinsic_search_cantor(x, args.n_max, args.window,
                                     max_precision=args.max_precision)
    rows = [(r.n, r.partial, r.b, r.p, r.q, r.status,
             r.quality.lo, r.quality.hi, r.bound, r.certified)
            for r in report.rows]
    result = {
        "point": args.point,
        "n_max": report.n_max,
        "window": report.window,
        "rows": [{"n": r.n, "partial": r.partial, "b": r.b, "p": r.p,
                  "q": r.q, "status": r.status, "quality": r.quality,
                  "bound": r.bound, "certified": r.certified}
                 for r in report.rows],
        "profile": [{"lo": b.lo, "hi": b.hi, "min_quality": b.min_quality,
                     "p": b.witness[0], "q": b.witness[1]}
                    for b in report.profile.buckets],
        "widened": [list(w) for w in report.widened],
        "all_intrinsic": list(report.all_intrinsic),
    }
    header = ("n", "partial", "b", "p", "q", "status",
              "quality_lo", "quality_hi", "bound", "certified")
    code = EXIT_OK if not report.all_intrinsic else EXIT_BUDGET
    return result, rows, header, code


def cmd_extrinsic(args):
    x = parse_point(args.point)
    if args.oracle == "builtin:cantor":
        oracle = cantor_oracle
    else:
        oracle = ifs_oracle(_parse_system(args.oracle), args.depth_cap)
    schedule = _parse_int_list(args.schedule)
    if not schedule:
        raise ConfigError("empty schedule")
    res = extrinsic_search_general(x, oracle, args.n, schedule,
                                   max_precision=args.max_precision)
    result = {
        "point": args.point,
        "n": res.n,
        "schedule": list(res.schedule),
        "witnesses": [{
            "p": list(w.p), "q": w.q, "status": w.verdict.status,
            "quality": w.quality, "certified": w.certified,
            "provenance": list(w.provenance)} for w in res.witnesses],
        "events": [{"min_q0": e.min_q0,
                    "statuses": [[i, s] for i, s in e.statuses]}
                   for e in res.events],
    }
    return result, None, None, EXIT_OK


def cmd_circle_census(args):
    if (args.point is None) == (args.param is None):
        raise ConfigError("give exactly one of --point or --param")
    if args.param is not None:
        point = circle_point_from_parameter(parse_scalar_spec(args.param))
    else:
        point = _parse_exact_point(args.point)
    c = _parse_fraction(args.c)
    report = psi_census(point, c, args.q_max)
    hits = [("intrinsic", h) for h in report.intrinsic] + \
           [("extrinsic", h) for h in report.extrinsic]
    rows = [(kind, h.p[0], h.p[1], h.q) for kind, h in hits]
    result = {
        "c": report.c,
        "q_max": report.q_max,
        "intrinsic": [{"p": list(h.p), "q": h.q} for h in report.intrinsic],
        "extrinsic": [{"p": list(h.p), "q": h.q} for h in report.extrinsic],
        "max_extrinsic_q": report.max_extrinsic_q,
        "exclusion_consistent": report.exclusion_consistent,
    }
    return result, rows, ("kind", "p1", "p2", "q"), EXIT_OK


def cmd_accept(args):
    from .acceptance import CRITERIA, run_criteria

    if args.list:
        for number, (name, _) in sorted(CRITERIA.items()):
            print("criterion %02d  %s" % (number, name))
        return None, None, None, EXIT_OK
    selected = _parse_int_list(args.criteria) if args.criteria else None
    results = run_criteria(selected, seed=args.seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(r.line())
    return None, None, None, (EXIT_OK if not failed else 1)


# ---------------------------------------------------------------------------
# Parser assembly.


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xda",
        description="Exact Diophantine approximation toolkit")
    parser.add_argument("--config", help="JSON experiment config file")
    parser.add_argument("--version", action="version",
                        version="xda %s" % __version__)
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed recorded in provenance")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="worker count; results are merged "
                             "deterministically regardless")
    common.add_argument("--output", help="write the artifact here instead "
                                         "of stdout")
    common.add_argument("--format", choices=("json", "csv"),
                        help="artifact format (default json; "
                             "cantor-dirichlet defaults to csv)")
    common.add_argument("--max-precision", type=int,
                        help="stream refinement cap (default from "
                             "XDA_MAX_PRECISION)")

    p = sub.add_parser("cf", parents=[common],
                       help="continued fraction expansion of one coordinate")
    p.add_argument("--point", required=True, help="scalar spec (rat:, quad:, dig:)")
    p.add_argument("--terms", type=int, required=True)
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("goodpair", parents=[common],
                       help="search a certified good pair")
    p.add_argument("--point", required=True)
    p.add_argument("--min-q", type=int, required=True)
    p.set_defaults(func=cmd_goodpair)

    p = sub.add_parser("progression", parents=[common],
                       help="projectivized progression from a good pair")
    p.add_argument("--point", required=True)
    p.add_argument("--min-q", type=int, required=True)
    p.add_argument("--i-max", type=int, default=16)
    p.set_defaults(func=cmd_progression)

    p = sub.add_parser("rap-scan", parents=[common],
                       help="longest (roughly) arithmetic progression")
    p.add_argument("--cantor-depth", type=int)
    p.add_argument("--points", help="JSON file with a point array")
    p.add_argument("--c", default="2", help="roughness bound C")
    p.add_argument("--ap", action="store_true", help="exact progressions only")
    p.add_argument("--max-len", type=int)
    p.add_argument("--budget", type=int, default=500_000)
    p.set_defaults(func=cmd_rap_scan)

    p = sub.add_parser("osc-check", parents=[common],
                       help="verify the open set condition")
    p.add_argument("--system", required=True,
                   help="builtin:NAME or a JSON system file")
    p.set_defaults(func=cmd_osc_check)

    p = sub.add_parser("cover", parents=[common],
                       help="minimal cylinder cover of a region")
    p.add_argument("--system", required=True)
    p.add_argument("--region", required=True,
                   help="interval:LO,HI or ball:CX,CY,R (scalar specs)")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("member", parents=[common],
                       help="decide membership in the attractor")
    p.add_argument("--system", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--depth-cap", type=int, default=64)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("porosity", parents=[common],
                       help="certify porosity along a line")
    p.add_argument("--system", required=True)
    p.add_argument("--anchor", required=True)
    p.add_argument("--direction", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--scales", required=True, help="comma-separated radii")
    p.add_argument("--samples", type=int, default=6)
    p.add_argument("--depth-cap", type=int, default=14)
    p.set_defaults(func=cmd_porosity)

    p = sub.add_parser("segment-scan", parents=[common],
                       help="search for segments inside the attractor")
    p.add_argument("--system", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--min-len", required=True)
    p.set_defaults(func=cmd_segment_scan)

    p = sub.add_parser("cantor-dirichlet", parents=[common],
                       help="semiconvergent window scan on a ternary stream")
    p.add_argument("--point", required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--window", type=int, required=True)
    p.set_defaults(func=cmd_cantor_dirichlet)

    p = sub.add_parser("extrinsic", parents=[common],
                       help="good-pair pipeline with a membership oracle")
    p.add_argument("--point", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--schedule", required=True, help="comma-separated heights")
    p.add_argument("--oracle", default="builtin:cantor")
    p.add_argument("--depth-cap", type=int, default=64)
    p.set_defaults(func=cmd_extrinsic)

    p = sub.add_parser("circle-census", parents=[common],
                       help="psi-approximability census on the unit circle")
    p.add_argument("--point")
    p.add_argument("--param", help="tangent half-angle parameter scalar spec")
    p.add_argument("--c", default="2")
    p.add_argument("--q-max", type=int, required=True)
    p.set_defaults(func=cmd_circle_census)

    p = sub.add_parser("accept", parents=[common],
                       help="run the acceptance suite")
    p.add_argument("--criteria", help="comma-separated criterion numbers")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_accept)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = ExperimentConfig.from_json(json.load(fh))
            return main(loaded.to_argv())
        if not args.command:
            parser.print_usage(sys.stderr)
            return EXIT_CONFIG
        result, rows, header, code = args.func(args)
        if result is not None:
            config = _config_from_args(args)
            if config.fmt == "csv":
                if args.command not in CSV_COMMANDS:
                    raise ConfigError("%s has no CSV schema" % args.command)
                text = _render_csv(config, header, rows)
            else:
                text = _render_json(config, result)
            _deliver(text, config, sys.stdout)
        return code
    except InvariantViolation as exc:
        print("xda: invariant violation: %s" % exc, file=sys.stderr)
        return EXIT_INVARIANT
    except PrecisionExhausted as exc:
        print("xda: budget exhausted: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except (OSError, json.JSONDecodeError, XDAError) as exc:
        print("xda: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
