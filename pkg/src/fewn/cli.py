"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 degenerate sample,
5 search cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from typing import Any, Sequence

from . import conjunction, figure, hiersim, planner, sample_tests
from .errors import DegenerateSampleError, DomainError, FewNError
from .sample_tests import Sidedness

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_DEGENERATE = 4
EXIT_NOT_FOUND = 5

CONFIG_SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "svg", "human")


class UsageError(Exception):
    pass


class NotFound(Exception):
    pass


class Report:
    """What a command produced: parameters plus a result record or table."""

    def __init__(self, command: str, params: dict, result: Any, columns: Sequence[str] | None = None):
        self.command = command
        self.params = params
        self.result = result
        self.columns = columns


# ---------------------------------------------------------------- formatting

def _num(x: Any) -> Any:
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, Sidedness) or isinstance(x, hiersim.Method):
        return x.value
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _cell(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, (Sidedness, hiersim.Method)):
        return x.value
    if isinstance(x, (list, tuple)):
        return ";".join(_cell(v) for v in x)
    return str(x)


def render_json(report: Report) -> str:
    body = {"command": report.command, "params": _num(report.params), "result": _num(report.result)}
    return json.dumps(body, indent=2, ensure_ascii=False) + "\n"


def render_csv(report: Report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    rows = report.result if isinstance(report.result, list) else [report.result]
    columns = list(report.columns or rows[0].keys())
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _human_value(key: str, value: Any) -> str:
    if key == "gamma_c" and isinstance(value, float):
        return f"{value:.2f}"
    return _cell(value)


def render_human(report: Report) -> str:
    lines = [report.command]
    rows = report.result if isinstance(report.result, list) else [report.result]
    if isinstance(report.result, list):
        columns = list(report.columns or rows[0].keys())
        lines.append("  ".join(columns))
        for row in rows:
            lines.append("  ".join(_human_value(c, row[c]) for c in columns))
    else:
        width = max(len(k) for k in report.result)
        for k, v in report.result.items():
            lines.append(f"  {k.ljust(width)}  {_human_value(k, v)}")
    return "\n".join(lines) + "\n"


def write_output(text: str, path: str | None) -> None:
    """Write to ``path`` atomically, or to stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fewn-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- parsing

def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if any(not math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("values must be finite")
    return values


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _sided(default: str | None):
    def add(p: argparse.ArgumentParser) -> None:
        p.add_argument("--sided", default=default,
                       help="one (positive direction), one-negative, or two (default: %(default)s)")
    return add


def _common(p: argparse.ArgumentParser, default_format: str = "human") -> None:
    p.add_argument("--format", choices=FORMATS, default=default_format)
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fewn",
        description="What inference does a given number of animals license?",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ttest", help="paired t-test on per-unit differences")
    p.add_argument("--diffs", type=_float_list, required=True, help="comma-separated differences (B - A)")
    p.add_argument("--alpha", type=float, default=0.05)
    _sided("two")(p)
    _common(p)

    p = sub.add_parser("signtest", help="exact sign test")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--signs", help="string of + and - characters, e.g. '+++++-'")
    g.add_argument("--diffs", type=_float_list, help="comma-separated differences; their signs are used")
    p.add_argument("--zeros", choices=("drop", "error"), default="drop",
                   help="how zero differences are treated (default: drop)")
    p.add_argument("--alpha", type=float, default=0.05)
    _sided("two")(p)
    _common(p)

    p_plan = sub.add_parser("plan", help="minimum-N and sensitivity calculators")
    plan = p_plan.add_subparsers(dest="plan_command", required=True)

    p = plan.add_parser("min-n", help="fewest animals for a sample Cohen's d to be significant")
    p.add_argument("--sample-d", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--cap", type=_positive_int, default=planner.DEFAULT_CAP)
    _sided("two")(p)
    _common(p)

    p = plan.add_parser("sign", help="fewest animals for a unanimous sign test to be significant")
    p.add_argument("--alpha", type=float, default=0.05)
    _sided("two")(p)
    _common(p)

    p = plan.add_parser("window", help="second-animal range for a significant two-animal t-test")
    p.add_argument("--first-diff", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    _common(p)

    p = plan.add_parser("power", help="Monte Carlo power, or minimum N for a target power")
    p.add_argument("--population-d", type=float, required=True)
    p.add_argument("--n", type=_positive_int, help="number of animals; omit to search for the minimum")
    p.add_argument("--target-power", type=float, default=0.8)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=_nonneg_int)
    p.add_argument("--reps", type=_positive_int, default=10000)
    p.add_argument("--cap", type=_positive_int, default=planner.DEFAULT_CAP)
    p.add_argument("--workers", type=_positive_int, default=1)
    _sided("two")(p)
    _common(p)

    p_conj = sub.add_parser("conjunction", help="typicality bounds from per-animal significance")
    conj = p_conj.add_subparsers(dest="conj_command", required=True)

    p = conj.add_parser("gamma", help="typicality lower bound for k of N significant animals")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--k", type=_nonneg_int, help="number significant (default: all N)")
    _conj_params(p)
    _common(p)

    p = conj.add_parser("n", help="animals required for a typicality bound")
    p.add_argument("--gamma", type=float, required=True)
    _conj_params(p)
    _common(p)

    p = sub.add_parser("figure1", help="required animals over a grid of typicality bounds")
    p.add_argument("--gamma-min", type=float, default=0.01)
    p.add_argument("--gamma-max", type=float, default=0.95)
    p.add_argument("--step", type=float, default=0.01)
    _conj_params(p)
    _common(p, default_format="csv")

    p = sub.add_parser("simulate", help="empirical rejection rates of the hierarchical simulator")
    p.add_argument("--config", required=True, metavar="PATH", help="JSON scenario document")
    p.add_argument("--seed", type=_nonneg_int)
    p.add_argument("--reps", type=_positive_int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--methods", help="comma-separated subset of: " + ", ".join(m.value for m in hiersim.Method))
    p.add_argument("--workers", type=_positive_int, default=1)
    _sided(None)(p)
    _common(p)
    return parser


def _conj_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.05, help="per-animal false-positive rate")
    p.add_argument("--beta", type=float, default=1.0, help="per-animal sensitivity (default 1)")
    p.add_argument("--p-crit", type=float, default=0.05)


# ---------------------------------------------------------------- commands

def _test_result_dict(r: sample_tests.TestResult) -> dict:
    return {
        "test": r.test,
        "statistic": r.statistic,
        "df": r.df,
        "p_value": r.p_value,
        "alpha": r.alpha,
        "significant": r.significant,
        "sidedness": r.sidedness,
    }


def cmd_ttest(args) -> Report:
    sided = Sidedness.parse(args.sided)
    result = sample_tests.paired_t_test(args.diffs, args.alpha, sided)
    d = sample_tests.cohens_d(args.diffs)
    params = {"diffs": args.diffs, "alpha": args.alpha, "sidedness": sided}
    return Report("ttest", params, {**_test_result_dict(result), "cohens_d": d})


def cmd_signtest(args) -> Report:
    sided = Sidedness.parse(args.sided)
    if args.signs is not None:
        signs = [c for c in args.signs if not c.isspace() and c != ","]
        dropped = 0
    else:
        zeros = sum(1 for v in args.diffs if v == 0)
        if zeros and args.zeros == "error":
            raise DomainError(f"{zeros} zero difference(s) present and --zeros=error")
        signs = [v for v in args.diffs if v != 0]
        dropped = zeros
    result = sample_tests.sign_test(signs, args.alpha, sided)
    params = {"n": len(signs), "zeros_dropped": dropped, "alpha": args.alpha, "sidedness": sided}
    return Report("signtest", params, _test_result_dict(result))


def cmd_plan(args) -> Report:
    sub = args.plan_command
    if sub == "min-n":
        sided = Sidedness.parse(args.sided)
        n = planner.min_n_sample_d(args.sample_d, args.alpha, sided, args.cap)
        if n is None:
            raise NotFound(f"no N <= {args.cap} makes sample d={args.sample_d} significant")
        params = {"sample_d": args.sample_d, "alpha": args.alpha, "sidedness": sided, "cap": args.cap}
        return Report("plan min-n", params, {"min_n": n})
    if sub == "sign":
        sided = Sidedness.parse(args.sided)
        n = planner.min_n_sign(args.alpha, sided)
        return Report("plan sign", {"alpha": args.alpha, "sidedness": sided}, {"min_n": n})
    if sub == "window":
        lo, hi = planner.second_animal_window(args.first_diff, args.alpha)
        result = {
            "lo": lo,
            "hi": hi,
            "lo_percent_of_first": 100.0 * lo / args.first_diff,
            "hi_percent_of_first": 100.0 * hi / args.first_diff,
        }
        return Report("plan window", {"first_diff": args.first_diff, "alpha": args.alpha}, result)
    # power
    if args.seed is None:
        raise UsageError("plan power is a Monte Carlo command and requires --seed")
    sided = Sidedness.parse(args.sided)
    params = {"population_d": args.population_d, "alpha": args.alpha, "sidedness": sided,
              "seed": args.seed, "reps": args.reps}
    if args.n is not None:
        query = planner.PowerQuery(args.population_d, args.n, args.alpha, sided, args.target_power)
        est = planner.power_t_mc(query, args.reps, args.seed, args.workers)
        params["n"] = args.n
        result = {"power": est.power, "rejections": est.rejections, "mc_reps": est.mc_reps,
                  "mc_halfwidth_95": est.mc_halfwidth_95, "degenerate_count": est.degenerate_count,
                  "seed": est.seed}
        return Report("plan power", params, result)
    n = planner.min_n_power(args.population_d, args.target_power, args.alpha, sided,
                            args.reps, args.seed, args.cap, args.workers)
    params.update(target_power=args.target_power, cap=args.cap)
    if n is None:
        raise NotFound(f"no N <= {args.cap} reaches power {args.target_power}")
    return Report("plan power", params, {"min_n": n})


def _typicality_dict(t: conjunction.TypicalityResult) -> dict:
    return {
        "gamma_c": t.gamma_c,
        "k": t.query.n_significant,
        "n": t.query.n_total,
        "method": t.method,
        "weak_evidence": t.weak_evidence,
        "saturated": t.saturated,
    }


def cmd_conjunction(args) -> Report:
    params = {"alpha": args.alpha, "beta": args.beta, "p_crit": args.p_crit}
    if args.conj_command == "gamma":
        k = args.n if args.k is None else args.k
        params.update(n=args.n, k=k)
        if k == args.n:
            t = conjunction.typicality_lower_bound(args.n, args.alpha, args.beta, args.p_crit)
        else:
            t = conjunction.partial_conjunction_bound(k, args.n, args.alpha, args.beta, args.p_crit)
        return Report("conjunction gamma", params, _typicality_dict(t))
    n_real, n_int = conjunction.required_n(args.gamma, args.alpha, args.beta, args.p_crit)
    params["gamma_c"] = args.gamma
    return Report("conjunction n", params, {"n_real": n_real, "n_int": n_int})


def cmd_figure1(args) -> Report:
    rows = conjunction.figure1_table(args.gamma_min, args.gamma_max, args.step,
                                     args.alpha, args.beta, args.p_crit)
    params = {"gamma_min": args.gamma_min, "gamma_max": args.gamma_max, "step": args.step,
              "alpha": args.alpha, "beta": args.beta, "p_crit": args.p_crit}
    return Report("figure1", params, [r._asdict() for r in rows], ("gamma_c", "n_real", "n_int"))


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    version = doc.get("schema_version")
    if version != CONFIG_SCHEMA_VERSION:
        raise UsageError(f"config schema_version must be {CONFIG_SCHEMA_VERSION}, got {version!r}")
    if "design" not in doc:
        raise UsageError("config needs a 'design' object")
    return doc


def cmd_simulate(args) -> Report:
    doc = load_config(args.config)
    seed = args.seed if args.seed is not None else doc.get("seed")
    if seed is None:
        raise UsageError("simulate requires a seed (--seed or 'seed' in the config)")
    reps = args.reps if args.reps is not None else doc.get("reps", 10000)
    alpha = args.alpha if args.alpha is not None else doc.get("alpha", 0.05)
    sided = Sidedness.parse(args.sided if args.sided is not None else doc.get("sided", "two"))
    if args.methods is not None:
        names = [m.strip() for m in args.methods.split(",") if m.strip()]
    elif "methods" in doc:
        names = list(doc["methods"])
    else:
        names = [m.value for m in hiersim.Method if sided.one_sided or m is not hiersim.Method.CONJUNCTION]
    valid = {m.value for m in hiersim.Method}
    unknown = [n for n in names if n not in valid]
    if unknown or not names:
        raise UsageError(f"unknown method(s) {unknown}; valid methods: {', '.join(sorted(valid))}")
    design = hiersim.HierarchicalDesign.from_dict(doc["design"])
    reports = hiersim.estimate_error_rates(design, names, alpha, sided, reps, seed, args.workers)
    params = {"design": design.to_dict(), "alpha": alpha, "sidedness": sided, "seed": seed, "reps": reps}
    rows = [
        {
            "method": r.method,
            "rejection_rate": r.rejection_rate,
            "rejections": r.rejections,
            "reps": r.reps,
            "mc_halfwidth_95": r.mc_halfwidth_95,
            "degenerate_count": r.degenerate_count,
            "seed": seed,
        }
        for r in reports
    ]
    return Report("simulate", params, rows)


COMMANDS = {
    "ttest": cmd_ttest,
    "signtest": cmd_signtest,
    "plan": cmd_plan,
    "conjunction": cmd_conjunction,
    "figure1": cmd_figure1,
    "simulate": cmd_simulate,
}


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "svg":
        rows = [conjunction.Figure1Row(**r) for r in report.result]
        p = report.params
        title = f"alpha={p['alpha']:g}, beta={p['beta']:g}, p_crit={p['p_crit']:g}"
        return figure.render_svg(rows, title)
    return render_human(report)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.format == "svg" and args.command != "figure1":
            raise UsageError("--format svg is only available for figure1")
        report = COMMANDS[args.command](args)
        text = render(report, args.format)
    except UsageError as exc:
        print(f"fewn: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotFound as exc:
        print(f"fewn: not found: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except DegenerateSampleError as exc:
        print(f"fewn: degenerate sample: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except FewNError as exc:
        print(f"fewn: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    write_output(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
