"""Command-line front end: alpha, beta, bounds, verify, and report pipelines.

Exit codes: 0 on success, 2 when any verification report fails, 1 on usage or
domain errors.  All files are written atomically (write to a temp file in the
target directory, then rename), and identical configurations reproduce
byte-identical CSV/JSON outputs.  Wall-clock timings go to stderr; they are
embedded in the JSON only with --timings, since real timings would break
byte-level reproducibility.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .alpha import AlphaEstimate, OptimizerSettings, estimate_alpha
from .beta import BetaBracket, BetaSettings, bracket_detail, g_of_lambda
from .bounds import (
    BoundInputs,
    LemmaGrid,
    LemmaReport,
    bound_row,
    magnetic_bound,
    relativistic_or_bosonic_bound,
    verify_lemma,
)
from .errors import DomainError, IonboundError
from .plots import Band, Panel, Series, render_svg

_BETA_UPPER_DEFAULT = 0.8705

_BOUNDS_CSV_SCHEMA = "Z,lieb,main,implicit_N,model_extra"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# run configuration and report bundle
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Echo of one invocation; re-running it reproduces all values exactly."""

    command: str
    parameters: dict
    seed: int
    out: str | None
    format: str
    tol: float | None

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "out": self.out,
            "format": self.format,
            "tol": self.tol,
        }


@dataclass
class ReportBundle:
    """Everything one run produced, plus the config needed to reproduce it."""

    version: str
    config: RunConfig
    alpha_estimates: list = field(default_factory=list)
    beta: BetaBracket | None = None
    bounds_rows: list = field(default_factory=list)
    lemma_reports: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


def _alpha_payload(est: AlphaEstimate) -> dict:
    return {
        "N": est.n,
        "value": est.value,
        "lower_bound": est.lower_bound,
        "restarts": est.restarts_used,
        "converged_restarts": est.converged_restarts,
        "best_config": [list(map(float, p)) for p in est.best_config.points],
    }


def _beta_payload(bracket: BetaBracket, extras: dict) -> dict:
    payload = {
        "lower": bracket.lower,
        "lower_source": bracket.lower_source,
        "upper": bracket.upper,
        "upper_source": bracket.upper_source,
    }
    payload.update(extras)
    if bracket.certificate_measure is not None:
        payload["certificate_measure"] = {
            "nodes": [float(x) for x in bracket.certificate_measure.nodes],
            "weights": [float(x) for x in bracket.certificate_measure.weights],
        }
    return payload


def _lemma_payload(report: LemmaReport) -> dict:
    return {
        "lemma": report.lemma,
        "grid": report.grid,
        "min_margin": report.min_margin,
        "pass": report.passed,
        "witness": list(report.witness),
        "out_of_hypothesis": report.out_of_hypothesis,
    }


# result sections each command always reports, even when empty
_SECTIONS = {
    "alpha": ("alpha",),
    "beta": ("beta",),
    "bounds": ("bounds",),
    "verify": ("lemmas",),
    "report": ("alpha", "beta", "bounds", "lemmas"),
}


def _bundle_payload(bundle: ReportBundle, include_timings: bool) -> dict:
    results: dict = {}
    for section in _SECTIONS.get(bundle.config.command, ()):
        if section == "alpha":
            results["alpha"] = [_alpha_payload(e) for e in bundle.alpha_estimates]
        elif section == "beta":
            results["beta"] = (
                None
                if bundle.beta is None
                else _beta_payload(bundle.beta, bundle.extras.get("beta_extras", {}))
            )
        elif section == "bounds":
            results["bounds"] = bundle.bounds_rows
        elif section == "lemmas":
            results["lemmas"] = [_lemma_payload(r) for r in bundle.lemma_reports]
    timings = bundle.timings if include_timings else {k: 0.0 for k in bundle.timings}
    return {
        "config": bundle.config.as_dict(),
        "results": results,
        "timings": timings,
        "version": bundle.version,
    }


# ---------------------------------------------------------------------------
# parsing and output helpers
# ---------------------------------------------------------------------------

def _parse_int_range(text: str) -> list[int]:
    try:
        a, b = (int(p) for p in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"expected an integer range a:b, got {text!r}") from exc
    if b < a:
        raise UsageError(f"empty range {text!r}")
    return list(range(a, b + 1))


def _parse_float_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"expected a range a:b[:step], got {text!r}")
    try:
        a, b = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 1.0
    except ValueError as exc:
        raise UsageError(f"could not parse range {text!r}") from exc
    if step <= 0 or b < a:
        raise UsageError(f"empty range {text!r}")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(count)]


def _parse_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"expected lo:hi, got {text!r}") from exc
    return lo, hi


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ionbound-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    sys.stderr.write(f"wrote {path}\n")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _csv_text(schema_id: str, header: str, rows: list[list]) -> str:
    lines = [f"#schema={schema_id}", header]
    lines.extend(",".join(_csv_cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit_timings(timings: dict) -> None:
    for stage, seconds in timings.items():
        sys.stderr.write(f"stage {stage}: {seconds:.3f}s\n")


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------

def _cmd_alpha(args) -> int:
    ns = _parse_int_range(args.n)
    if ns[0] < 2:
        raise DomainError("alpha needs N >= 2")
    settings = OptimizerSettings(
        restarts=args.restarts, ratio_tolerance=args.tol, seed=args.seed
    )
    config = RunConfig(
        command="alpha",
        parameters={"n": args.n, "restarts": args.restarts},
        seed=args.seed,
        out=args.out,
        format=args.format,
        tol=args.tol,
    )
    bundle = ReportBundle(version=__version__, config=config)
    t0 = time.perf_counter()
    for n in ns:
        bundle.alpha_estimates.append(estimate_alpha(n, settings))
    bundle.timings["alpha"] = time.perf_counter() - t0
    _emit_timings(bundle.timings)
    if args.out:
        _atomic_write(args.out, _render_alpha(bundle, args))
    return 0


def _render_alpha(bundle: ReportBundle, args) -> str:
    if args.format == "csv":
        rows = [
            [e.n, e.value, e.lower_bound, e.restarts_used, e.converged_restarts]
            for e in bundle.alpha_estimates
        ]
        text = _csv_text(
            "ionbound.alpha.v1", "N,value,lower_bound,restarts,converged_restarts", rows
        )
        # stochastic results always travel with their seed
        schema, rest = text.split("\n", 1)
        return f"{schema}\n#seed={bundle.config.seed}\n{rest}"
    if args.format == "svg":
        return render_svg([_alpha_panel(bundle.alpha_estimates)])
    return _json_text(_bundle_payload(bundle, args.timings))


def _alpha_panel(estimates: list[AlphaEstimate]) -> Panel:
    ns = [e.n for e in estimates]
    return Panel(
        title="ratio estimates vs N with the two-sided band",
        xlabel="N",
        ylabel="ratio",
        series=[Series("estimate", ns, [e.value for e in estimates])],
        band=Band(ns, [e.lower_bound for e in estimates], [_BETA_UPPER_DEFAULT] * len(ns)),
    )


def _cmd_beta(args) -> int:
    lo, hi = _parse_pair(args.range)
    settings = BetaSettings(
        g_tolerance=args.tol,
        lambda_grid=args.lambda_grid,
        node_count=args.nodes,
        node_range=(lo, hi),
    )
    config = RunConfig(
        command="beta",
        parameters={
            "nodes": args.nodes,
            "range": args.range,
            "lambda_grid": args.lambda_grid,
        },
        seed=args.seed,
        out=args.out,
        format=args.format,
        tol=args.tol,
    )
    bundle = ReportBundle(version=__version__, config=config)
    t0 = time.perf_counter()
    bundle.beta, bundle.extras["beta_extras"] = _compute_beta(settings)
    bundle.timings["beta"] = time.perf_counter() - t0
    _emit_timings(bundle.timings)
    if args.out:
        _atomic_write(args.out, _render_beta(bundle, args))
    return 0


def _compute_beta(settings: BetaSettings) -> tuple[BetaBracket, dict]:
    detail = bracket_detail(settings)
    extras = {
        "g": {"lambda_0": detail.lambda_0, "g_max": detail.g_max},
        "maximin": {
            "value": detail.maximin.value,
            "grid_error": detail.maximin.grid_error,
            "lambda_at_max": detail.maximin.lambda_at_max,
        },
        "radial_minimum": detail.radial_minimum,
    }
    return detail.bracket, extras


def _render_beta(bundle: ReportBundle, args) -> str:
    if args.format == "svg":
        lams = list(np.linspace(0.8, 1.0, 201))
        return render_svg(
            [
                Panel(
                    title="scalar reduction g over the blend parameter",
                    xlabel="lambda",
                    ylabel="g",
                    series=[Series("g", lams, [g_of_lambda(l).g for l in lams])],
                )
            ]
        )
    if args.format == "csv":
        extras = bundle.extras["beta_extras"]
        row = [
            bundle.beta.lower,
            bundle.beta.lower_source,
            bundle.beta.upper,
            bundle.beta.upper_source,
            extras["g"]["lambda_0"],
            extras["g"]["g_max"],
            extras["maximin"]["value"],
            extras["maximin"]["grid_error"],
            extras["radial_minimum"],
        ]
        return _csv_text(
            "ionbound.beta.v1",
            "lower,lower_source,upper,upper_source,lambda_0,g_max,maximin,maximin_grid_error,radial_minimum",
            [row],
        )
    return _json_text(_bundle_payload(bundle, args.timings))


_MODEL_FLAGS = {
    "nonrel": "nonrel",
    "magnetic": "magnetic-homogeneous",
    "relativistic": "relativistic",
    "bosonic": "bosonic-magnetic",
}


def _bounds_rows(zs: list[float], args) -> list[list]:
    model = _MODEL_FLAGS[args.model]
    rows = []
    for z in zs:
        nonrel = BoundInputs(Z=z, beta_lower=args.beta, coeff=args.coeff)
        row = bound_row(nonrel)
        if model == "nonrel":
            extra = ""
        else:
            inputs = BoundInputs(
                Z=z,
                model=model,
                B=args.B,
                beta_lower=args.beta,
                coeff=args.coeff,
                C_universal=args.C,
                C_kappa=args.Ckappa,
                C_2=args.C2,
            )
            if model == "magnetic-homogeneous":
                extra = magnetic_bound(inputs)
            else:
                extra = relativistic_or_bosonic_bound(inputs)
        rows.append([z, row.lieb, row.main, row.implicit_n, extra])
    return rows


def _cmd_bounds(args) -> int:
    zs = _parse_float_range(args.z)
    config = RunConfig(
        command="bounds",
        parameters={
            "z": args.z,
            "model": args.model,
            "B": args.B,
            "coeff": args.coeff,
            "beta": args.beta,
            "C": args.C,
            "Ckappa": args.Ckappa,
            "C2": args.C2,
        },
        seed=args.seed,
        out=args.out,
        format=args.format,
        tol=args.tol,
    )
    bundle = ReportBundle(version=__version__, config=config)
    t0 = time.perf_counter()
    rows = _bounds_rows(zs, args)
    bundle.timings["bounds"] = time.perf_counter() - t0
    bundle.bounds_rows = [
        {
            "Z": r[0],
            "lieb": r[1],
            "main": r[2],
            "implicit_N": r[3],
            "model_extra": r[4] if r[4] != "" else None,
        }
        for r in rows
    ]
    _emit_timings(bundle.timings)
    if args.out:
        _atomic_write(args.out, _render_bounds(bundle, rows, args))
    return 0


def _render_bounds(bundle: ReportBundle, rows: list[list], args) -> str:
    if args.format == "csv":
        return _csv_text("ionbound.bounds.v1", _BOUNDS_CSV_SCHEMA, rows)
    if args.format == "svg":
        return render_svg([_bounds_panel(rows)])
    return _json_text(_bundle_payload(bundle, args.timings))


def _bounds_panel(rows: list[list]) -> Panel:
    zs = [r[0] for r in rows]
    return Panel(
        title="particle-count bounds vs nuclear charge",
        xlabel="Z",
        ylabel="bound",
        series=[
            Series("2Z+1", zs, [r[1] for r in rows]),
            Series("closed form", zs, [r[2] for r in rows]),
            Series("implicit", zs, [r[3] for r in rows]),
        ],
    )


_LEMMA_FLAGS = {"lemma3": ["lemma3"], "lemma4": ["lemma4"], "cubic": ["cubic-signs"]}
_LEMMA_FLAGS["all"] = ["lemma3", "lemma4", "cubic-signs"]


def _verify_grid(args) -> LemmaGrid:
    lo, hi = _parse_pair(args.beta_range)
    return LemmaGrid(
        z_points=args.grid_z,
        ratio_points=args.grid_ratio,
        beta_points=args.grid_beta,
        beta_range=(lo, hi) if args.grid_beta > 1 else (lo, lo),
        n_above=args.n_above,
        real_n=args.real_n,
    )


def _cmd_verify(args) -> int:
    grid = _verify_grid(args)
    config = RunConfig(
        command="verify",
        parameters={"lemma": args.lemma, "grid": grid.as_dict()},
        seed=args.seed,
        out=args.out,
        format=args.format,
        tol=args.tol,
    )
    bundle = ReportBundle(version=__version__, config=config)
    t0 = time.perf_counter()
    for lemma in _LEMMA_FLAGS[args.lemma]:
        bundle.lemma_reports.append(verify_lemma(lemma, grid))
    bundle.timings["verify"] = time.perf_counter() - t0
    _emit_timings(bundle.timings)
    for report in bundle.lemma_reports:
        status = "pass" if report.passed else "FAIL"
        sys.stderr.write(
            f"{report.lemma}: {status} (min margin {report.min_margin:.6g})\n"
        )
    if args.out:
        _atomic_write(args.out, _json_text(_bundle_payload(bundle, args.timings)))
    return 0 if all(r.passed for r in bundle.lemma_reports) else 2


def _cmd_report(args) -> int:
    config = RunConfig(
        command="report",
        parameters={
            "n": args.n,
            "restarts": args.restarts,
            "nodes": args.nodes,
            "range": args.range,
            "lambda_grid": args.lambda_grid,
            "z": args.z,
            "model": args.model,
            "B": args.B,
            "coeff": args.coeff,
            "beta": args.beta,
        },
        seed=args.seed,
        out=args.out,
        format=args.format,
        tol=args.tol,
    )
    bundle = ReportBundle(version=__version__, config=config)

    t0 = time.perf_counter()
    settings = OptimizerSettings(
        restarts=args.restarts, ratio_tolerance=args.tol, seed=args.seed
    )
    for n in _parse_int_range(args.n):
        bundle.alpha_estimates.append(estimate_alpha(n, settings))
    bundle.timings["alpha"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    lo, hi = _parse_pair(args.range)
    beta_settings = BetaSettings(
        g_tolerance=args.tol,
        lambda_grid=args.lambda_grid,
        node_count=args.nodes,
        node_range=(lo, hi),
    )
    bundle.beta, bundle.extras["beta_extras"] = _compute_beta(beta_settings)
    bundle.timings["beta"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rows = _bounds_rows(_parse_float_range(args.z), args)
    bundle.bounds_rows = [
        {
            "Z": r[0],
            "lieb": r[1],
            "main": r[2],
            "implicit_N": r[3],
            "model_extra": r[4] if r[4] != "" else None,
        }
        for r in rows
    ]
    bundle.timings["bounds"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for lemma in ("lemma3", "cubic-signs"):
        bundle.lemma_reports.append(verify_lemma(lemma, LemmaGrid()))
    bundle.timings["verify"] = time.perf_counter() - t0
    _emit_timings(bundle.timings)

    if args.out:
        if args.format == "csv":
            content = _csv_text("ionbound.bounds.v1", _BOUNDS_CSV_SCHEMA, rows)
        elif args.format == "svg":
            lams = list(np.linspace(0.8, 1.0, 201))
            content = render_svg(
                [
                    _bounds_panel(rows),
                    _alpha_panel(bundle.alpha_estimates),
                    Panel(
                        title="scalar reduction g over the blend parameter",
                        xlabel="lambda",
                        ylabel="g",
                        series=[Series("g", lams, [g_of_lambda(l).g for l in lams])],
                    ),
                ]
            )
        else:
            content = _json_text(_bundle_payload(bundle, args.timings))
        _atomic_write(args.out, content)
    return 0 if all(r.passed for r in bundle.lemma_reports) else 2


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_shared(sub: argparse.ArgumentParser, default_format: str) -> None:
    sub.add_argument("--seed", type=int, default=0, help="64-bit seed for stochastic work")
    sub.add_argument("--out", type=str, default=None, help="output file path")
    sub.add_argument(
        "--format", choices=("csv", "json", "svg"), default=default_format,
        help="output format",
    )
    sub.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
    sub.add_argument(
        "--timings", action="store_true",
        help="embed real wall-clock timings in JSON (breaks byte reproducibility)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ionbound", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("alpha", help="estimate the N-point ratio constants")
    p.add_argument("--n", type=str, default="2:8", help="inclusive N range a:b")
    p.add_argument("--restarts", type=int, default=64)
    _add_shared(p, "csv")
    p.set_defaults(func=_cmd_alpha)

    p = subs.add_parser("beta", help="bracket the statistical-limit constant")
    p.add_argument("--nodes", type=int, default=200, help="radial node count")
    p.add_argument("--range", type=str, default="0.05:20", help="node range lo:hi")
    p.add_argument("--lambda-grid", type=int, default=101, dest="lambda_grid")
    _add_shared(p, "json")
    p.set_defaults(func=_cmd_beta)

    p = subs.add_parser("bounds", help="tabulate particle-count bounds over Z")
    p.add_argument("--z", type=str, default="1:118", help="charge range a:b[:step]")
    p.add_argument("--model", choices=tuple(_MODEL_FLAGS), default="nonrel")
    p.add_argument("--B", type=float, default=0.0, help="magnetic field strength")
    p.add_argument("--coeff", type=float, default=1.22)
    p.add_argument("--beta", type=float, default=0.8218)
    p.add_argument("--C", type=float, default=1.0, help="universal magnetic constant")
    p.add_argument("--Ckappa", type=float, default=1.0, help="relativistic constant")
    p.add_argument("--C2", type=float, default=1.0, help="bosonic constant")
    _add_shared(p, "csv")
    p.set_defaults(func=_cmd_bounds)

    p = subs.add_parser("verify", help="run the inequality grid verifiers")
    p.add_argument("--lemma", choices=("lemma3", "lemma4", "cubic", "all"), default="all")
    p.add_argument("--grid-z", type=int, default=120, dest="grid_z")
    p.add_argument("--grid-ratio", type=int, default=120, dest="grid_ratio")
    p.add_argument("--grid-beta", type=int, default=1, dest="grid_beta")
    p.add_argument("--beta-range", type=str, default="0.8218:0.99", dest="beta_range")
    p.add_argument("--n-above", type=int, default=24, dest="n_above")
    p.add_argument("--real-n", action="store_true", dest="real_n",
                   help="also scan non-integer particle counts (flagged out-of-hypothesis)")
    _add_shared(p, "json")
    p.set_defaults(func=_cmd_verify)

    p = subs.add_parser("report", help="full pipeline with machine-readable output")
    p.add_argument("--n", type=str, default="2:6")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--nodes", type=int, default=200)
    p.add_argument("--range", type=str, default="0.05:20")
    p.add_argument("--lambda-grid", type=int, default=101, dest="lambda_grid")
    p.add_argument("--z", type=str, default="1:20")
    p.add_argument("--model", choices=tuple(_MODEL_FLAGS), default="nonrel")
    p.add_argument("--B", type=float, default=0.0)
    p.add_argument("--coeff", type=float, default=1.22)
    p.add_argument("--beta", type=float, default=0.8218)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--Ckappa", type=float, default=1.0)
    p.add_argument("--C2", type=float, default=1.0)
    _add_shared(p, "json")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return 1
    except IonboundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
