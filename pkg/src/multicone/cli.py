"""Command-line front end: ``multicone <subcommand> [options]``.

Exit codes: 0 ok, 1 unexpected mismatch or failed run, 2 malformed input,
3 infeasible rates, 4 unproven.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Any, Sequence

from . import __version__, channels, codec, model
from .geometry import h_to_v
from .prover import (
    ConstraintSet,
    ExpressionSyntaxError,
    LEMMAS,
    ProofCertificate,
    UnknownVariable,
    parse_expression,
    prove,
    verify_chain,
    verify_cutsets,
    verify_lemma,
)
from .rational import common_denominator, fmt, fmt_vector, parse_vector

OK, MISMATCH, MALFORMED, INFEASIBLE, UNPROVEN = 0, 1, 2, 3, 4


class Malformed(ValueError):
    pass


@dataclass
class Result:
    data: dict
    code: int = OK
    table: list[list[Any]] | None = None
    header: list[str] | None = None
    config: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# input helpers


def parse_rstar(text: str, l: int | None = None) -> tuple[Fraction, ...]:
    """``"1,1,1"``, ``"1/2,0,..."`` or a JSON object keyed by index labels."""
    text = text.strip()
    try:
        if text.startswith("{"):
            r = model.rates_from_dict(json.loads(text))
        else:
            r = parse_vector(text)
        r = model.rate_vector(r, l)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise Malformed(f"malformed rstar {text!r}: {exc}") from exc
    if any(x < 0 for x in r):
        raise Malformed(f"rstar entries must be nonnegative: {text!r}")
    return r


def _rstar_value(value, l: int | None = None) -> tuple[Fraction, ...]:
    if isinstance(value, dict):
        return parse_rstar(json.dumps(value), l)
    if isinstance(value, list):
        return parse_rstar(",".join(str(v) for v in value), l)
    if isinstance(value, str):
        return parse_rstar(value, l)
    raise Malformed(f"malformed rstar {value!r}")


def _transform(spec: dict, channel: str, l: int):
    if "op" in spec:
        try:
            op = codec.get_op(spec["op"], channel, l)
        except codec.UnknownOp as exc:
            raise Malformed(f"unknown op {spec['op']!r}") from exc
        return codec.Applied(op, spec.get("delta", "0"))
    if "pad" in spec:
        return codec.Pad(tuple(spec["pad"]))
    if "chain" in spec:
        return codec.Chain(tuple(_transform(s, channel, l) for s in spec["chain"]))
    raise Malformed(f"cannot read codec part {spec!r}")


def build_codec(cfg: dict, r_star: Sequence, channel: str, l: int):
    """The codec named by a simulate config, or None for the identity."""
    if "op" in cfg:
        return _transform({"op": cfg["op"], "delta": cfg.get("delta", "0")}, channel, l)
    if "chain" in cfg:
        return _transform({"chain": cfg["chain"]}, channel, l)
    if "schedule" in cfg:
        parts = []
        for part in cfg["schedule"]:
            part = dict(part)
            weight = part.pop("weight", None)
            if weight is None:
                raise Malformed("every schedule part needs a weight")
            parts.append(codec.SchedulePart(_transform(part, channel, l), weight))
        sched = codec.Schedule(tuple(parts))
        sched.validate()
        return sched
    if "target" in cfg:
        target = _rstar_value(cfg["target"], l)
        chain = codec.plan_chain(channel, r_star, target)
        if chain is None:
            raise channels.InfeasibleRates("target is not reachable from rstar with the available operations")
        return chain
    return None


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify_cones(args) -> Result:
    pairs = [(c, l) for c in model.CHANNELS for l in (2, 3)]
    if args.channel:
        pairs = [p for p in pairs if p[0] == args.channel]
    if args.l:
        pairs = [p for p in pairs if p[1] == args.l]
    results = []
    table = []
    for ch, l in pairs:
        f = model.cone_duality(ch, l)
        expected = model.finding_is_expected(f)
        entry = {
            "channel": ch,
            "l": l,
            "verdict": f.verdict,
            "expected_verdict": model.EXPECTED_VERDICTS[(ch, l)],
            "expected": expected,
            "rays": f.n_rays,
            "computed_rays": [list(r) for r in f.computed_rays],
            "printed_rays": [list(r) for r in f.printed_rays],
        }
        if f.corrected_rays is not None:
            entry["corrected_rays"] = [list(r) for r in f.corrected_rays]
        if f.note:
            entry["note"] = f.note
        results.append(entry)
        table.append([ch, l, f.n_rays, f.verdict, expected])
    ok = all(r["expected"] for r in results)
    return Result(
        {"results": results, "ok": ok},
        OK if ok else MISMATCH,
        table,
        ["channel", "l", "rays", "verdict", "expected"],
        {"channel": args.channel, "l": args.l},
    )


def cmd_region(args) -> Result:
    r_star = parse_rstar(args.rstar, args.l)
    l = model.dimension_to_l(len(r_star))
    h = model.region(args.channel, r_star)
    v = h_to_v(h)
    ineqs = [{"a": fmt_vector(a), "b": fmt(b)} for a, b in h.all_inequalities()]
    data = {
        "channel": args.channel,
        "l": l,
        "labels": model.labels(l),
        "hrep": {"inequalities": ineqs},
        "vrep": {"vertices": [fmt_vector(x) for x in v.vertices], "rays": [list(r) for r in v.rays]},
    }
    table = [["le", *fmt_vector(a), fmt(b)] for a, b in h.all_inequalities()]
    table += [["vertex", *fmt_vector(x), ""] for x in v.vertices]
    table += [["ray", *r, ""] for r in v.rays]
    config = {"channel": args.channel, "l": l, "rstar": model.rates_to_dict(r_star)}
    return Result(data, OK, table, ["kind", *model.labels(l), "rhs"], config)


def load_config(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        cfg = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise Malformed(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise Malformed("config must be a JSON object")
    return cfg


def cmd_simulate(args) -> Result:
    cfg = load_config(args.config) if args.config else {}
    for key in ("channel", "rstar", "op", "delta", "n", "k", "trials", "target"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    channel = str(cfg.get("channel", "bc")).lower()
    if channel not in model.CHANNELS:
        raise Malformed(f"unknown channel {channel!r}")
    if "rstar" not in cfg:
        raise Malformed("rstar is required")
    r_star = _rstar_value(cfg["rstar"])
    l = model.dimension_to_l(len(r_star))
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    k = int(cfg.get("k", 1))
    trials = int(cfg.get("trials", 1))
    try:
        cdc = build_codec(cfg, r_star, channel, l)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, (channels.InfeasibleRates, Malformed)):
            raise
        raise Malformed(str(exc)) from exc
    if "n" in cfg:
        n = int(cfg["n"])
    else:
        base = codec.min_block_length(cdc if cdc is not None else codec.Chain(()), r_star)
        if channel == "mac":
            base = lcm(base, k * common_denominator(r_star))
        n = base * -(-1024 // base)
    resolved = {
        "channel": channel,
        "rstar": model.rates_to_dict(r_star),
        "codec": channels._codec_dict(cdc, None) if cdc is not None else {"identity": True},
        "n": n,
        "k": k if channel == "mac" else None,
        "trials": trials,
        "seed": seed,
    }
    try:
        report = channels.run_end_to_end(channel, r_star, cdc, n, seed, k=k, trials=trials)
    except (channels.InfeasibleRates, codec.DeltaOutOfRange, codec.NegativeCompositeRate) as exc:
        return Result({"error": str(exc), "infeasible": True}, INFEASIBLE, None, None, resolved)
    except codec.NonIntegralSegment as exc:
        raise Malformed(str(exc)) from exc
    data = report.to_dict()
    table = [[key, val] for key, val in sorted(report.bit_errors.items())]
    return Result(data, OK if report.ok else MISMATCH, table, ["receiver:message", "bit_errors"], resolved)


def _read_constraints(lines: Sequence[str], names) -> list:
    out = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line:
            lhs, rhs = line.split("=", 1)
            rhs = rhs.strip() or "0"
            out.append(parse_expression(lhs, names) - parse_expression(rhs, names))
        else:
            out.append(parse_expression(line, names))
    return out


def _expression_names(texts: Sequence[str]) -> tuple[str, ...]:
    names = set()
    for t in texts:
        for side in t.split("="):
            if side.strip():
                names.update(parse_expression(side).names)
    return tuple(sorted(names))


def cmd_prove(args) -> Result:
    config = {"lemma": args.lemma, "expression": args.expression, "given": args.given or [],
              "constraints": args.constraints, "numeric": args.numeric, "seed": args.seed or 0}
    if args.lemma:
        name = args.lemma
        if name == "chain":
            rep = verify_chain(numeric_trials=args.numeric, seed=args.seed or 0)
        elif name == "cutset":
            rep = verify_cutsets(numeric_trials=args.numeric, seed=args.seed or 0)
        elif name in LEMMAS:
            rep = verify_lemma(name, max_ground=args.max_ground, numeric_trials=args.numeric, seed=args.seed or 0)
            config["max_ground"] = args.max_ground
        else:
            raise Malformed(f"unknown lemma {name!r}; choose from {', '.join(LEMMAS)}, chain, cutset")
        table = [[r.instance.label, r.proved, "" if r.numeric_min is None else f"{r.numeric_min:.3g}"] for r in rep.results]
        return Result(rep.to_dict(), OK if rep.passed else UNPROVEN, table, ["instance", "proved", "numeric_min"], config)
    if not args.expression:
        raise Malformed("give an expression or --lemma")
    lines = list(args.given or [])
    if args.constraints:
        try:
            lines += Path(args.constraints).read_text().splitlines()
        except OSError as exc:
            raise Malformed(f"cannot read constraints {args.constraints!r}: {exc}") from exc
    texts = [args.expression] + [x for x in lines if x.strip() and not x.strip().startswith("#")]
    try:
        names = tuple(args.vars.split(",")) if args.vars else _expression_names(texts)
        target = parse_expression(args.expression, names)
        cons = _read_constraints(lines, names)
    except (ExpressionSyntaxError, UnknownVariable) as exc:
        raise Malformed(str(exc)) from exc
    result = prove(target, ConstraintSet(tuple(cons)))
    data = result.to_dict()
    proved = isinstance(result, ProofCertificate)
    table = [[d["inequality"], d["lambda"]] for d in data.get("elemental_multipliers", [])]
    table += [[d["equality"], d["mu"]] for d in data.get("constraint_multipliers", [])]
    return Result(data, OK if proved else UNPROVEN, table, ["term", "multiplier"], config)


def cmd_cuts(args) -> Result:
    rows = model.table1_report()
    matches = model.table1_matches_g(corrected=True)
    printed_bad = [r["row"] for r in rows if "printed" in r and r["printed"]["g_column"] is None]
    data = {
        "rows": rows,
        "special_bound_11": model.special_bound_11().as_dict(),
        "multiset_matches_g_bc_3": matches,
        "printed_table_matches": model.table1_matches_g(corrected=False),
        "corrected_rows": sorted(model.TABLE1_CORRECTIONS),
    }
    ok = matches and printed_bad == sorted(model.TABLE1_CORRECTIONS)
    table = [[r["row"], r["collections"], r["condition"], " ".join(map(str, r["lhs"])), r["tight"], r["g_column"]] for r in rows]
    return Result(data, OK if ok else MISMATCH, table, ["row", "collections", "condition", "lhs", "tight", "g_column"], {})


# ---------------------------------------------------------------------------
# output


def _flatten(prefix: str, value, out: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        if isinstance(value, list):
            value = " ".join(str(v) for v in value)
        out.append((prefix, "" if value is None else str(value)))


def render(result: Result, fmt_name: str, command: str) -> str:
    envelope = {"tool": "multicone", "version": __version__, "command": command, "config": result.config,
                "exit_code": result.code, **result.data}
    if fmt_name == "json":
        return json.dumps(envelope, indent=2) + "\n"
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if result.table is not None:
            w.writerow(result.header)
            w.writerows(result.table)
        else:
            rows: list[tuple[str, str]] = []
            _flatten("", envelope, rows)
            w.writerow(["key", "value"])
            w.writerows(rows)
        return buf.getvalue()
    lines = [f"multicone {__version__} {command}"]
    if result.table is not None:
        widths = [max(len(str(x)) for x in col) for col in zip(result.header, *result.table)]
        lines.append("  ".join(str(h).ljust(w) for h, w in zip(result.header, widths)))
        for row in result.table:
            lines.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)))
    else:
        rows = []
        _flatten("", result.data, rows)
        lines += [f"{k}: {v}" for k, v in rows]
    lines.append(f"exit {result.code}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="multicone", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"multicone {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    vc = sub.add_parser("verify-cones", parents=[common], help="facet/ray duality for all channel and L pairs")
    vc.add_argument("--channel", choices=model.CHANNELS)
    vc.add_argument("--l", type=int, choices=(2, 3))

    rg = sub.add_parser("region", parents=[common], help="H and V representations of the R*-multicast region")
    rg.add_argument("rstar", help='rates in index order, e.g. "1,1,1" or "1/2,0,1,..."; or a JSON object')
    rg.add_argument("--channel", choices=model.CHANNELS, default="bc")
    rg.add_argument("--l", type=int, choices=(2, 3))

    sm = sub.add_parser("simulate", parents=[common], help="end-to-end encode, transmit and decode")
    sm.add_argument("config", nargs="?", help="JSON trial config ('-' for stdin)")
    sm.add_argument("--channel", choices=model.CHANNELS)
    sm.add_argument("--rstar")
    sm.add_argument("--op")
    sm.add_argument("--delta")
    sm.add_argument("--target", help="rate vector to reach by a chain of operations")
    sm.add_argument("--n", type=int)
    sm.add_argument("--k", type=int)
    sm.add_argument("--trials", type=int)

    pv = sub.add_parser("prove", parents=[common], help="prove an entropy inequality or a lemma suite")
    pv.add_argument("expression", nargs="?", help="target expression, asserted >= 0")
    pv.add_argument("--lemma", help=f"one of {', '.join(LEMMAS)}, chain, cutset")
    pv.add_argument("--given", action="append", help="equality constraint, e.g. 'H(Z|X) = 0'; repeatable")
    pv.add_argument("--constraints", help="file with one equality constraint per line")
    pv.add_argument("--vars", help="comma-separated variable names (default: those mentioned, sorted)")
    pv.add_argument("--numeric", type=int, default=0, help="random distributions per instance for the float cross-check")
    pv.add_argument("--max-ground", type=int, default=4)

    sub.add_parser("cuts", parents=[common], help="cut-set inequalities generated from Table 1")
    return p


COMMANDS = {
    "verify-cones": cmd_verify_cones,
    "region": cmd_region,
    "simulate": cmd_simulate,
    "prove": cmd_prove,
    "cuts": cmd_cuts,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return MALFORMED if exc.code not in (0, None) else 0
    fmt_name = getattr(args, "format", "json")
    args.seed = getattr(args, "seed", None)
    out = getattr(args, "out", None)
    try:
        result = COMMANDS[args.command](args)
    except Malformed as exc:
        result = Result({"error": str(exc)}, MALFORMED)
    except channels.InfeasibleRates as exc:
        result = Result({"error": str(exc), "infeasible": True}, INFEASIBLE)
    text = render(result, fmt_name, args.command)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    if result.code == MALFORMED:
        print(f"multicone: {result.data.get('error')}", file=sys.stderr)
    return result.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
