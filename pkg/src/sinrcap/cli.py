"""Command-line front end.

Exit codes: 0 success, 1 usage/config, 2 model error, 3 size limit,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from . import __version__
from .affectance import Oblivious, SinrCheck
from .capacity import brute_min_schedule, brute_opt, check_gr_chain, gr, schedule_gr
from .errors import ConfigError, SinrError, SizeLimit
from .lemmas import (
    ValidatorReport,
    construct_geometry_sample,
    construct_l3_sample,
    geometry_report,
    l3_report,
    validate_interference_lemmas,
)
from .measures import inductive_independence, max_avg_affectance, max_out_affectance
from .model import GeneratorConfig, Instance, SinrParams, delta, digest, dumps, generate, load

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_SIZE, EXIT_VALIDATION = 0, 1, 2, 3, 4

MEASURE_COLUMNS = [
    "schema_version", "seed", "p", "target_delta", "delta", "n",
    "which", "q_mode", "method", "value", "instance",
]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed_range(text: str) -> list[int]:
    """``7``, ``0..49`` or ``1,4,9``."""
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",")]


def _q_mode(text: str):
    return "pc" if text == "pc" else float(text)


def _params(args) -> SinrParams:
    return SinrParams(args.alpha, args.beta, args.noise)


def _add_params(p):
    p.add_argument("--alpha", type=float, default=3.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--noise", type=float, default=1.0)


def _add_gen(p, n_default=12):
    p.add_argument("--n", type=int, default=n_default)
    p.add_argument("--world-size", type=float, default=10.0)
    p.add_argument("--delta", type=float, default=4.0, help="target Delta (max/min link length)")
    p.add_argument("--length-min", type=float, default=1.0)


def _add_output(p):
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    p.set_defaults(fmt="json")
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.add_argument("--timestamp", action="store_true", help="add a wall-clock timestamp field")


def _config(args) -> dict:
    skip = {"func", "output", "fmt", "timestamp"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _report(args, result: dict) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": _config(args), "result": result}
    if args.timestamp:
        doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return doc


def _json(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, (set, frozenset, tuple)):
        return sorted(x) if isinstance(x, (set, frozenset)) else list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def _load(path: str) -> Instance:
    return load(path)


# --- commands ----------------------------------------------------------------

def cmd_gen(args) -> int:
    cfg = GeneratorConfig(args.n, args.world_size, args.delta, args.length_min, args.seed)
    inst = generate(cfg, _params(args))
    _emit(args, dumps(inst))
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    assignment = Oblivious(args.p, args.scale) if args.scale is not None else None
    trace = gr(inst, args.p, assignment=assignment)
    chain = check_gr_chain(inst, trace)
    result = {
        "instance": digest(inst),
        "n": inst.n,
        "p": args.p,
        "scale": trace.assignment.scale,
        "R_size": len(trace.accepted),
        "X_size": len(trace.final),
        "R": trace.accepted,
        "X": trace.final,
        "tested": {str(k): v for k, v in trace.tested.items()},
        "chain": chain,
        "chain_ok": all(chain.values()),
        "X_raw_feasible": SinrCheck(inst, trace.assignment)(trace.final),
    }
    if args.oracle:
        opt = brute_opt(inst, "pc", max_n=12)
        result["opt_pc_size"] = len(opt)
        result["opt_pc"] = list(opt)
        result["ratio"] = len(opt) / len(trace.final)
    if args.fmt == "csv":
        cols = ["schema_version", "instance", "n", "p", "R_size", "X_size", "chain_ok", "X_raw_feasible"]
        if args.oracle:
            cols += ["opt_pc_size", "ratio"]
        row = {"schema_version": SCHEMA_VERSION, **{k: result[k] for k in cols[1:]}}
        _emit(args, _csv([row], cols))
    else:
        _emit(args, _json(_report(args, result)))
    return EXIT_OK


def _mode_arg(text: str):
    return "pc" if text == "pc" else float(text)


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    mode = _mode_arg(args.mode)
    opt = brute_opt(inst, mode, max_n=args.max_n)
    result = {"instance": digest(inst), "mode": args.mode, "opt_size": len(opt), "opt": list(opt)}
    if args.chi:
        result["chi"] = brute_min_schedule(inst, mode, max_n=min(args.max_n, 12))
    if args.fmt == "csv":
        cols = ["schema_version", "instance", "mode", "opt_size"] + (["chi"] if args.chi else [])
        row = {"schema_version": SCHEMA_VERSION, **{k: result[k] for k in cols[1:]}}
        _emit(args, _csv([row], cols))
    else:
        _emit(args, _json(_report(args, result)))
    return EXIT_OK


def cmd_schedule(args) -> int:
    inst = _load(args.instance)
    sched = schedule_gr(inst, args.p)
    check = SinrCheck(inst, sched.assignment)
    result = {
        "instance": digest(inst),
        "p": args.p,
        "slots": sched.slots,
        "slot_count": len(sched),
        "slots_raw_feasible": [check(s) for s in sched.slots],
    }
    if args.oracle:
        chi = brute_min_schedule(inst, args.p, max_n=12)
        result["chi"] = chi
        result["ratio"] = len(sched) / chi
    if args.fmt == "csv":
        cols = ["schema_version", "instance", "p", "slot_count"] + (["chi", "ratio"] if args.oracle else [])
        row = {"schema_version": SCHEMA_VERSION, **{k: result[k] for k in cols[1:]}}
        _emit(args, _csv([row], cols))
    else:
        _emit(args, _json(_report(args, result)))
    return EXIT_OK


def _measure_one(inst: Instance, args, p: float) -> tuple[dict, dict]:
    if args.which == "ind":
        rep = inductive_independence(
            inst, p, _q_mode(args.q), max_n=args.max_n, method=args.method or "exact",
            samples=args.samples, seed=args.sample_seed,
        )
    elif args.which == "avgaff":
        rep = max_avg_affectance(inst, p, method=args.method or "exact", max_n=args.max_n)
    else:
        rep = max_out_affectance(inst, p, max_n=args.max_n, grid=args.grid)
    row = {
        "p": p,
        "delta": delta(inst),
        "n": inst.n,
        "which": args.which,
        "q_mode": args.q if args.which == "ind" else "",
        "method": rep.method,
        "value": rep.value,
        "instance": rep.digest,
    }
    return row, rep.to_dict()


def cmd_measure(args) -> int:
    rows, reports = [], []
    ps = _float_list(args.p)
    if args.instance:
        inst = _load(args.instance)
        for p in ps:
            row, rep = _measure_one(inst, args, p)
            rows.append({"schema_version": SCHEMA_VERSION, "seed": "", "target_delta": "", **row})
            reports.append(rep)
    else:
        for seed in _seed_range(args.seeds):
            for p in ps:
                for td in _float_list(args.sweep_delta):
                    cfg = GeneratorConfig(args.n, args.world_size, td, args.length_min, seed)
                    inst = generate(cfg, _params(args))
                    row, rep = _measure_one(inst, args, p)
                    rows.append({"schema_version": SCHEMA_VERSION, "seed": seed, "target_delta": td, **row})
                    reports.append(rep)
        order = sorted(range(len(rows)), key=lambda i: (rows[i]["seed"], rows[i]["p"], rows[i]["target_delta"]))
        rows = [rows[i] for i in order]
        reports = [reports[i] for i in order]
    if args.fmt == "csv":
        _emit(args, _csv(rows, MEASURE_COLUMNS))
    else:
        _emit(args, _json(_report(args, {"rows": rows, "reports": reports})))
    return EXIT_OK


def _junit(reports: dict[str, ValidatorReport]) -> str:
    suite = ET.Element(
        "testsuite",
        name="sinrcap.validate",
        tests=str(len(reports)),
        failures=str(sum(not r.ok for r in reports.values())),
    )
    for name, rep in reports.items():
        case = ET.SubElement(suite, "testcase", classname="sinrcap.validate", name=name)
        ET.SubElement(case, "system-out").text = json.dumps(
            {"checked": rep.checked, "skipped": rep.skipped, "skip_reasons": rep.skip_reasons, "stats": rep.stats},
            sort_keys=True,
        )
        if not rep.ok:
            fail = ET.SubElement(case, "failure", message=f"{len(rep.violations)} violations")
            fail.text = json.dumps(rep.violations[:20], default=_jsonable)
    return ET.tostring(suite, encoding="unicode") + "\n"


def cmd_validate(args) -> int:
    params = _params(args)
    seeds = _seed_range(args.seeds)
    totals = {name: ValidatorReport(name) for name in ("geometry", "l3bound", "lld", "affequi", "l3bound_instance")}
    for seed in seeds:
        rng = np.random.default_rng(seed)
        totals["geometry"].merge(
            geometry_report([construct_geometry_sample(rng, params) for _ in range(args.samples)])
        )
        totals["l3bound"].merge(
            l3_report([construct_l3_sample(rng, params, args.p) for _ in range(args.samples)])
        )
        if args.instance:
            inst = _load(args.instance)
        else:
            inst = generate(GeneratorConfig(args.n, args.world_size, args.delta, args.length_min, seed), params)
        lemmas = validate_interference_lemmas(inst, args.p, args.tau, samples=args.lemma_samples, seed=seed)
        totals["lld"].merge(lemmas["lld"])
        totals["affequi"].merge(lemmas["affequi"])
        totals["l3bound_instance"].merge(lemmas["l3bound"])
    for rep in totals.values():
        for reason, count in rep.skip_reasons.items():
            print(f"skip {rep.name}: {reason} (x{count})", file=sys.stderr)
    if args.report == "junit":
        _emit(args, _junit(totals))
    else:
        _emit(args, _json(_report(args, {k: v.to_dict() for k, v in totals.items()})))
    return EXIT_OK if all(r.ok for r in totals.values()) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sinrcap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a random instance")
    _add_gen(p)
    _add_params(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the greedy capacity algorithm")
    p.add_argument("instance")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--scale", type=float, help="fixed power scale instead of the non-weak minimum")
    p.add_argument("--oracle", action="store_true", help="also compute the exact power-control optimum")
    _add_output(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive optimum capacity (and slot count)")
    p.add_argument("instance")
    p.add_argument("--mode", default="pc", help="'pc' or an oblivious exponent p")
    p.add_argument("--chi", action="store_true", help="also compute the minimum slot count")
    p.add_argument("--max-n", type=int, default=16)
    _add_output(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("schedule", help="schedule by repeated greedy passes")
    p.add_argument("instance")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--oracle", action="store_true")
    _add_output(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("measure", help="interference measures on a file or a generated sweep")
    p.add_argument("instance", nargs="?")
    p.add_argument("--which", choices=["ind", "avgaff", "outaff"], default="ind")
    p.add_argument("--p", default="0.5", help="comma-separated exponents")
    p.add_argument("--q", default="pc", help="feasibility mode for ind: 'pc' or an exponent")
    p.add_argument("--method", choices=["exact", "peel", "sampled"])
    p.add_argument("--max-n", type=int, default=14)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=9)
    p.add_argument("--seeds", default="0")
    p.add_argument("--sweep-delta", default="4")
    _add_gen(p)
    _add_params(p)
    _add_output(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("validate", help="falsification sweep of the structural lemmas")
    p.add_argument("instance", nargs="?")
    p.add_argument("--seeds", default="0..99")
    p.add_argument("--samples", type=int, default=10, help="constructed samples per seed")
    p.add_argument("--lemma-samples", type=int, default=4)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--report", choices=["json", "junit"], default="json")
    _add_gen(p)
    p.set_defaults(delta=1e4)
    _add_params(p)
    p.add_argument("-o", "--output")
    p.add_argument("--timestamp", action="store_true")
    p.set_defaults(func=cmd_validate, fmt="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SizeLimit as e:
        print(f"size limit: {e}", file=sys.stderr)
        return EXIT_SIZE
    except SinrError as e:
        link = getattr(e, "link", None)
        print(f"model error: {e}" + (f" [link {link}]" if link is not None else ""), file=sys.stderr)
        return EXIT_MODEL
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    raise SystemExit(main())
