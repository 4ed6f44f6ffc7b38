"""Command-line front end.

    entmono compute SPEC MEASURE PARTITION   one measure across one cut
    entmono check SPEC INEQUALITY            one inequality with its verdict
    entmono suite IDS                        closed-form example suites

SPEC is a JSON document (a file path, ``-`` for stdin, or inline text) with
either a ``family`` plus ``params`` or explicit ``dims`` and ``amplitudes``
given as [re, im] pairs in row-major ket order.

Exit codes: 0 success, 1 violated inequality, 2 bad input, 3 invariant
violation, 4 inconclusive verdict.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import states
from .errors import InputError, InvariantError
from .measures import (
    MeasureValue,
    RoofConfig,
    coa,
    coa_closed_form,
    concurrence,
    cren,
    crenoa,
    negativity_mixed,
    negativity_pure,
    wootters_concurrence,
)
from .monogamy import InequalityReport, run_check, worst_verdict
from .suite import SuiteResult, closed_form_suite
from .tensor import Bipartition, MixedState, PureState, partial_trace

SCHEMA = 1
EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_INVARIANT, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
CHECK_NAMES = ("ckw", "coa-dual", "cren", "crenoa-dual", "theorem1", "corollary1",
               "theorem2", "theorem3", "identity", "entropy")
MEASURES = ("negativity", "concurrence", "cren", "crenoa", "coa", "wootters", "coa-closed")


# -- state specs -------------------------------------------------------------------


def _load_json(text: str) -> Any:
    if text == "-":
        raw = sys.stdin.read()
    elif text.lstrip().startswith("{"):
        raw = text
    else:
        try:
            raw = Path(text).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {text}: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from exc


def _complex_list(values) -> np.ndarray:
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise InputError(f"complex entries must be [re, im] pairs, got {v!r}")
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(float(v)))
    return np.asarray(out, dtype=complex)


def _coefficients(p: dict) -> states.WClassCoefficients:
    if "coefficients" in p:
        rows = [_complex_list(r) for r in p["coefficients"]]
        if len({len(r) for r in rows}) != 1:
            raise InputError("coefficient rows must have equal length")
        c = np.array(rows)
        return states.WClassCoefficients.normalized(c) if p.get("normalize") else states.WClassCoefficients(c)
    return states.WClassCoefficients.uniform(int(p.get("n", 3)), int(p.get("d", 3)))


def _amp(p: dict, key: str, default=None):
    if key not in p:
        if default is None:
            raise InputError(f"missing parameter {key!r}")
        return default
    v = p[key]
    return complex(float(v[0]), float(v[1])) if isinstance(v, (list, tuple)) else float(v)


def _family(name: str, p: dict):
    if name == "ghz":
        a = _amp(p, "a")
        return states.ghz(int(p.get("n", 3)), a, _amp(p, "b", float(np.sqrt(max(0.0, 1 - abs(a) ** 2)))))
    if name == "w":
        return states.w_state(int(p.get("n", 3)))
    if name == "antisymmetric333":
        return states.antisymmetric_333()
    if name == "wclass":
        return states.generalized_w_class(_coefficients(p))
    if name == "wvacuum":
        return states.w_vacuum_superposition(float(_amp(p, "p").real), _coefficients(p))
    if name == "theorem1":
        return states.theorem1_saturating(_amp(p, "a"), p.get("b") and _amp(p, "b"))
    if name in ("theorem2", "theorem3"):
        fn = states.theorem2_saturating if name == "theorem2" else states.theorem3_saturating
        return fn(_amp(p, "a"), _amp(p, "b"), _amp(p, "c"))
    if name == "random_pure":
        return states.random_pure(p.get("dims", [2, 2, 2]), int(p.get("seed", 0)))
    if name == "random_mixed":
        return states.random_mixed(p.get("dims", [2, 2]), int(p.get("rank", 2)), int(p.get("seed", 0)))
    raise InputError(f"unknown family {name!r}")


def parse_state(spec: Any):
    """Build a PureState or MixedState from a decoded state spec."""
    if not isinstance(spec, dict):
        raise InputError("state spec must be a JSON object")
    has_family, has_explicit = "family" in spec, "dims" in spec or "amplitudes" in spec
    if has_family == has_explicit:
        raise InputError("state spec needs exactly one of 'family' or 'dims'+'amplitudes'")
    try:
        if has_family:
            params = spec.get("params", {})
            if not isinstance(params, dict):
                raise InputError("'params' must be an object")
            return _family(str(spec["family"]), params)
        if "dims" not in spec or "amplitudes" not in spec:
            raise InputError("explicit spec needs both 'dims' and 'amplitudes'")
        return PureState.normalized(spec["dims"], _complex_list(spec["amplitudes"]))
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad state spec: {exc}") from exc


# -- config ------------------------------------------------------------------------


def _threads(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"threads must be 'auto' or a positive integer, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be positive")
    return n


def config_from(args) -> RoofConfig:
    base = RoofConfig()
    cfg = RoofConfig(
        restarts=args.restarts if args.restarts is not None else base.restarts,
        iterations=args.iters if args.iters is not None else base.iterations,
        ensemble_size=args.ensemble,
        tolerance=args.tol if args.tol is not None else base.tolerance,
        seed=args.seed,
        threads=args.threads,
    )
    if cfg.restarts < 1 or cfg.iterations < 1 or cfg.tolerance <= 0:
        raise InputError("restarts and iterations must be positive, tolerance > 0")
    return cfg


def _config_record(cfg: RoofConfig) -> dict:
    # thread count is deliberately left out: output must not depend on it
    return {"seed": cfg.seed, "restarts": cfg.restarts, "iterations": cfg.iterations,
            "ensemble_size": cfg.ensemble_size, "tolerance": cfg.tolerance}


# -- rendering -------------------------------------------------------------------


def num(x: Optional[float], digits: int = 12) -> Optional[float]:
    if x is None:
        return None
    return float(f"{x:.{digits}g}") + 0.0


def _tagged(x: float, bound: str) -> dict:
    return {"value": num(x), "bound": bound}


def _measure_record(mv: MeasureValue) -> dict:
    return {"value": _tagged(mv.value, mv.bound), "squared": _tagged(mv.squared, mv.bound),
            "evaluations": mv.evaluations}


def _report_record(rep: InequalityReport) -> dict:
    def terms(ts):
        return [{"label": t.label, "coefficient": num(t.coeff), "squared": t.squared,
                 "value": _tagged(t.value.value, t.value.bound)} for t in ts]

    slack_bound = "exact" if rep.lhs_bound == rep.rhs_bound == "exact" else "estimate"
    return {"name": rep.name, "relation": rep.relation,
            "lhs": _tagged(rep.lhs, rep.lhs_bound), "rhs": _tagged(rep.rhs, rep.rhs_bound),
            "lhs_terms": terms(rep.lhs_terms), "rhs_terms": terms(rep.rhs_terms),
            "slack": _tagged(rep.slack, slack_bound), "verdict": rep.verdict,
            "tolerance": rep.tolerance}


ROW_FIELDS = ["suite_id", "case", "quantity", "paper_value", "computed_value", "abs_diff",
              "bound", "provenance", "flag"]


def _row_record(row) -> dict:
    return {"suite_id": row.suite_id, "case": row.case, "quantity": row.quantity,
            "paper_value": num(row.paper_value), "computed_value": num(row.computed_value),
            "abs_diff": num(row.abs_diff), "bound": row.bound, "provenance": row.provenance,
            "flag": row.flag}


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(["" if v is None else v for v in r] for r in rows)
    return buf.getvalue()


def _g6(x) -> str:
    return "" if x is None else f"{x:.6g}"


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_g6(v) if isinstance(v, float) else ("" if v is None else str(v)) for v in r]
                        for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _report_rows(rep: InequalityReport) -> list[list]:
    rows = [[rep.name, side, t.label, t.coeff, t.value.value, t.contribution, t.value.bound]
            for side, ts in (("lhs", rep.lhs_terms), ("rhs", rep.rhs_terms)) for t in ts]
    rows += [[rep.name, "lhs total", rep.relation, None, None, rep.lhs, rep.lhs_bound],
             [rep.name, "rhs total", "", None, None, rep.rhs, rep.rhs_bound],
             [rep.name, "slack", f"tol={rep.tolerance:g}", None, None, rep.slack, rep.verdict]]
    return rows


def emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# -- commands ----------------------------------------------------------------------


def _measure(name: str, state, part: Bipartition, cfg: RoofConfig) -> MeasureValue:
    if name == "negativity":
        return negativity_pure(state, part) if isinstance(state, PureState) else negativity_mixed(state, part)
    if name in ("wootters", "coa-closed"):
        if state.dims != (2, 2) or part.side_a not in ((0,), (1,)):
            raise InputError(f"{name} needs a two-qubit state split 0|1")
        fn = wootters_concurrence if name == "wootters" else coa_closed_form
        return fn(state)
    return {"concurrence": concurrence, "cren": cren, "crenoa": crenoa, "coa": coa}[name](state, part, cfg)


def cmd_compute(args) -> int:
    cfg = config_from(args)
    state = parse_state(_load_json(args.spec))
    if args.keep:
        keep = [int(x) for x in args.keep.replace(" ", "").split(",")]
        if sorted(keep) != keep or len(set(keep)) != len(keep):
            raise InputError("--keep indices must be strictly increasing")
        state = partial_trace(state, keep)
    part = Bipartition.parse(args.partition)
    part.validate(len(state.dims))
    mv = _measure(args.measure, state, part, cfg)
    if args.output == "json":
        text = _dump({"schema": SCHEMA, "command": "compute", "measure": args.measure,
                      "partition": str(part), "dims": list(state.dims), "keep": args.keep,
                      "config": _config_record(cfg), "result": _measure_record(mv)})
    else:
        header = ["measure", "partition", "value", "squared", "bound", "evaluations"]
        row = [args.measure, str(part), mv.value, mv.squared, mv.bound, mv.evaluations]
        if args.output == "csv":
            text = _csv(header, [[v if not isinstance(v, float) else num(v) for v in row]])
        else:
            text = _table(header, [row])
    emit(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = config_from(args)
    if args.inequality not in CHECK_NAMES:
        raise InputError(f"unknown inequality {args.inequality!r}; choose from {', '.join(CHECK_NAMES)}")
    state = parse_state(_load_json(args.spec))
    part = Bipartition.parse(args.partition) if args.partition else None
    reports = run_check(args.inequality, state, cfg, part)
    verdict = worst_verdict(reports)
    if args.output == "json":
        text = _dump({"schema": SCHEMA, "command": "check", "inequality": args.inequality,
                      "dims": list(state.dims), "config": _config_record(cfg),
                      "reports": [_report_record(r) for r in reports], "verdict": verdict})
    else:
        header = ["inequality", "side", "term", "coefficient", "value", "contribution", "bound"]
        rows = [r for rep in reports for r in _report_rows(rep)]
        if args.output == "csv":
            text = _csv(header, [[num(v) if isinstance(v, float) else v for v in r] for r in rows])
        else:
            text = _table(header, rows) + f"verdict: {verdict}\n"
    emit(text, args.out)
    return {"violated": EXIT_VIOLATED, "inconclusive": EXIT_INCONCLUSIVE}.get(verdict, EXIT_OK)


def _suite_ids(text: str) -> list[int]:
    if text == "all":
        return [1, 2, 3, 4]
    try:
        ids = [int(x) for x in text.replace(" ", "").split(",")]
    except ValueError as exc:
        raise InputError(f"bad suite ids {text!r}") from exc
    return ids


def _suite_params(path: Optional[str]) -> dict:
    if not path:
        return {}
    data = _load_json(path)
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise InputError("params file must map suite ids to parameter objects")
    return {int(k): v for k, v in data.items()}


def cmd_suite(args) -> int:
    cfg = config_from(args)
    params = _suite_params(args.params)
    results: list[SuiteResult] = [closed_form_suite(i, params.get(i), cfg) for i in _suite_ids(args.ids)]
    rows = [r for s in results for r in s.rows]
    violations = sum(s.violations for s in results)
    summary = {"rows": len(rows), "discrepancies": sum(s.discrepancies for s in results),
               "violations": violations,
               "reports": sum(len(s.reports) for s in results)}
    if args.output == "json":
        suites = [{"example_id": s.example_id,
                   "cases": [{"params": {k: num(v) if isinstance(v, float) else v for k, v in c.params.items()},
                              "reports": [_report_record(r) for r in c.reports]} for c in s.cases]}
                  for s in results]
        text = _dump({"schema": SCHEMA, "command": "suite", "config": _config_record(cfg),
                      "suites": suites, "rows": [_row_record(r) for r in rows], "summary": summary})
    elif args.output == "csv":
        text = _csv(ROW_FIELDS, [[_row_record(r)[f] for f in ROW_FIELDS] for r in rows])
    else:
        table = [[r.suite_id, r.case, r.quantity, r.paper_value, r.computed_value, r.abs_diff,
                  r.bound, r.provenance, r.flag] for r in rows]
        verdicts = [[s.example_id, str(c.params), rep.name, rep.slack, rep.verdict]
                    for s in results for c in s.cases for rep in c.reports]
        text = (_table(ROW_FIELDS, table) + "\n"
                + _table(["suite_id", "case", "inequality", "slack", "verdict"], verdicts)
                + "\n" + " ".join(f"{k}={v}" for k, v in summary.items()) + "\n")
    emit(text, args.out)
    return EXIT_OK if violations == 0 else EXIT_VIOLATED


# -- parser ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, help="optimizer restarts (default 64)")
    common.add_argument("--iters", type=int, help="iterations per restart (default 500)")
    common.add_argument("--ensemble", type=int, help="decomposition size (default min(2r, r^2))")
    common.add_argument("--tol", type=float, help="optimizer stagnation tolerance")
    common.add_argument("--threads", type=_threads, default=1, help="'auto' or a positive integer")
    common.add_argument("--output", choices=("table", "json", "csv"), default="table")
    common.add_argument("--out", help="write output to FILE instead of stdout")

    parser = _Parser(prog="entmono", description="Entanglement measures and monogamy checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", parents=[common], help="evaluate one measure")
    p.add_argument("spec", help="state spec: JSON file, '-' for stdin, or inline JSON")
    p.add_argument("measure", choices=MEASURES)
    p.add_argument("partition", help="bipartition such as '0|1,2'")
    p.add_argument("--keep", help="trace out everything except these subsystems first, e.g. '0,1'")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("check", parents=[common], help="evaluate one inequality")
    p.add_argument("spec")
    p.add_argument("inequality", help=", ".join(CHECK_NAMES))
    p.add_argument("--partition", help="bipartition for the entropy check (default 0|rest)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("suite", parents=[common], help="run closed-form example suites")
    p.add_argument("ids", nargs="?", default="all", help="'all' or comma-separated ids 1-4")
    p.add_argument("--params", help="JSON file mapping suite id to parameter overrides")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
