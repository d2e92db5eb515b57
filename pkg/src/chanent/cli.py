"""Command-line interface.

Every subcommand produces a list of result rows and prints them as text, CSV
or JSON. CSV columns are fixed::

    subcommand, channel_name, alpha, value, certificate, exactness, iterations, seed, route

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed
acceptance check.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from . import acceptance
from .bosonic import BosonicChannelParams, constrained_entropy, unconstrained_entropy
from .channels import KrausChannel
from .divergence import (
    adversarial_choi_divergence,
    adversarial_divergence,
    choi_divergence,
    choi_entropy_suite,
    generalized_channel_divergence,
)
from .entropy import (
    cb_one_to_alpha_norm,
    channel_entropy,
    extended_min_entropy,
    min_entropy_channel,
    renyi_channel_entropy,
)
from .errors import ChanentError, NumericalError, ValidationError
from .optimize import NumericPolicy, OptimizationReport
from .spec_io import channel_from_spec, channel_to_spec, load_channel, standard_spec

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 2, 3, 4
COLUMNS = ("subcommand", "channel_name", "alpha", "value", "certificate", "exactness", "iterations", "seed", "route")
SWEEP_QUANTITIES = ("entropy", "renyi", "min-entropy", "ext-min-entropy", "cb-norm")
DIVERGENCE_MODES = ("choi", "generalized", "adversarial", "adversarial-choi")


@dataclass
class Row:
    subcommand: str
    channel_name: str
    alpha: Optional[float]
    value: float
    certificate: Optional[float]
    exactness: str
    iterations: int
    seed: int
    route: str = ""


class _Parser(argparse.ArgumentParser):
    """Argument errors raise instead of exiting, so they map to exit code 2."""

    def error(self, message):
        raise ValidationError(message)


def _report_tag(rep: OptimizationReport) -> str:
    if rep.fw_gap is not None:
        return "certified" if rep.converged else "heuristic_bound"
    return "heuristic_bound"


def _row_from_report(sub: str, name: str, alpha, rep: OptimizationReport, seed: int) -> Row:
    return Row(sub, name, alpha, rep.value, rep.certificate, _report_tag(rep), rep.iterations, seed, rep.route)


def _channel_label(ch: KrausChannel, fallback: str) -> str:
    return ch.name or fallback


# ------------------------------------------------------------------ quantities


def _quantity(quantity: str, ch: KrausChannel, name: str, alpha, policy: NumericPolicy) -> Row:
    seed = policy.seed
    if quantity == "entropy":
        return _row_from_report("entropy", name, None, channel_entropy(ch, policy), seed)
    if quantity == "renyi":
        if alpha is None:
            raise ValidationError("renyi needs --alpha")
        rep = renyi_channel_entropy(ch, alpha, policy)
        row = _row_from_report("renyi", name, alpha, rep, seed)
        row.route = f"{rep.route};route_gap={rep.details['route_gap']:.3e}"
        return row
    if quantity == "min-entropy":
        return Row("min-entropy", name, None, min_entropy_channel(ch), None, "closed_form", 0, seed, "choi_eigenvalue")
    if quantity == "ext-min-entropy":
        return _row_from_report("ext-min-entropy", name, None, extended_min_entropy(ch, policy), seed)
    if quantity == "cb-norm":
        if alpha is None:
            raise ValidationError("cb-norm needs --alpha")
        return _row_from_report("cb-norm", name, alpha, cb_one_to_alpha_norm(ch, alpha, policy), seed)
    raise ValidationError(f"unknown quantity {quantity!r}; expected one of {SWEEP_QUANTITIES}")


def _divergence(args, policy: NumericPolicy) -> list[Row]:
    left, right = load_channel(args.left), load_channel(args.right)
    kind = args.kind
    if kind in ("renyi", "petz") and args.alpha is None:
        raise ValidationError(f"--kind {kind} needs --alpha")
    alpha = args.alpha if kind in ("renyi", "petz") else None
    fn = {
        "choi": lambda: choi_divergence(left, right, kind, alpha),
        "generalized": lambda: generalized_channel_divergence(left, right, kind, alpha, policy),
        "adversarial": lambda: adversarial_divergence(left, right, kind, alpha, policy),
        "adversarial-choi": lambda: adversarial_choi_divergence(left, right, kind, alpha, policy),
    }[args.mode]
    res = fn()
    name = f"{_channel_label(left, args.left)}||{_channel_label(right, args.right)}"
    return [
        Row("divergence", name, alpha, res.value, res.certificate, res.exactness, res.iterations, policy.seed,
            f"{res.mode}:{res.kind}")
    ]


def _choi_suite(args, policy: NumericPolicy) -> list[Row]:
    if args.alpha is None:
        raise ValidationError("choi-suite needs --alpha")
    ch = load_channel(args.channel)
    name = _channel_label(ch, args.channel)
    suite = choi_entropy_suite(ch, args.alpha, policy)
    rows = []
    for field in suite._fields:
        tag = "certified" if field == "sandwiched_optimized" else "closed_form"
        alpha = None if field == "conditional" else args.alpha
        rows.append(Row("choi-suite", name, alpha, getattr(suite, field), None, tag, 0, policy.seed, field))
    return rows


def _bosonic(args, policy: NumericPolicy) -> list[Row]:
    p = BosonicChannelParams(args.family, eta=args.eta, gain=args.gain, xi=args.xi, n_b=args.nb, n_s=args.ns)
    if args.unconstrained:
        value, route = unconstrained_entropy(p), "unconstrained"
    else:
        if args.ns is None:
            raise ValidationError("bosonic needs --ns or --unconstrained")
        value, route = constrained_entropy(p), f"n_s={args.ns}"
    return [Row("bosonic", args.family, None, value, None, "closed_form", 0, policy.seed, route)]


def _parse_grid(items: Sequence[str]) -> list[tuple[str, list]]:
    grid = []
    for item in items:
        if "=" not in item:
            raise ValidationError(f"--param {item!r}: expected NAME=V1,V2,...")
        key, vals = item.split("=", 1)
        parsed = []
        for v in vals.split(","):
            try:
                parsed.append(json.loads(v))
            except json.JSONDecodeError:
                raise ValidationError(f"--param {key}: cannot parse value {v!r}") from None
        grid.append((key, parsed))
    return grid


def _sweep_point(job) -> Row:
    quantity, spec, label, alpha, policy = job
    ch = channel_from_spec(spec)
    return _quantity(quantity, ch, label, alpha, policy)


def _sweep(args, policy: NumericPolicy) -> list[Row]:
    try:
        alphas = [None] if args.alphas is None else [float(a) for a in args.alphas.split(",")]
    except ValueError:
        raise ValidationError(f"--alphas: expected comma-separated numbers, got {args.alphas!r}") from None
    specs: list[tuple[dict, str]] = []
    if args.standard:
        grid = _parse_grid(args.param or [])
        keys = [k for k, _ in grid]
        for combo in itertools.product(*[v for _, v in grid]):
            params = dict(zip(keys, combo))
            label = args.standard + "(" + ",".join(f"{k}={v}" for k, v in params.items()) + ")"
            specs.append((standard_spec(args.standard, label, **params), label))
    for path in args.channel or []:
        ch = load_channel(path)
        specs.append((channel_to_spec(ch), _channel_label(ch, path)))
    if not specs:
        raise ValidationError("sweep needs --channel or --standard")
    jobs = [(args.quantity, spec, label, a, policy) for spec, label in specs for a in alphas]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_point, jobs))  # map keeps grid order
    else:
        rows = [_sweep_point(j) for j in jobs]
    for r in rows:
        r.subcommand = f"sweep:{r.subcommand}"
    return rows


# ------------------------------------------------------------------ output


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render(rows: list[Row], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([asdict(r) for r in rows], indent=1, allow_nan=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
        return buf.getvalue()
    lines = []
    for r in rows:
        head = f"{r.subcommand} {r.channel_name}"
        if r.alpha is not None:
            head += f" alpha={r.alpha:g}"
        extra = [r.exactness]
        if r.certificate is not None:
            extra.append(f"certificate={r.certificate:.3e}")
        if r.iterations:
            extra.append(f"iterations={r.iterations}")
        if r.route:
            extra.append(f"route={r.route}")
        lines.append(f"{head}: {r.value:.10g} ({', '.join(extra)})")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-8, help="optimality tolerance (default 1e-8)")
    common.add_argument("--restarts", type=int, default=8, help="restarts for non-concave problems (default 8)")
    common.add_argument("--max-iter", type=int, default=5000, help="iteration cap per run (default 5000)")
    common.add_argument("--seed", type=int, default=42, help="seed for all randomness (default 42)")
    common.add_argument("--output", choices=("text", "csv", "json"), default="text")

    parser = _Parser(prog="chanent", description="Entropies and divergences of quantum channels.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    for name, help_ in (
        ("entropy", "von Neumann channel entropy"),
        ("min-entropy", "channel min-entropy (closed form)"),
        ("ext-min-entropy", "extended min-entropy (semidefinite program)"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--channel", required=True, metavar="PATH")
    p = sub.add_parser("renyi", parents=[common], help="sandwiched Renyi channel entropy")
    p.add_argument("--channel", required=True, metavar="PATH")
    p.add_argument("--alpha", type=float, required=True)

    p = sub.add_parser("divergence", parents=[common], help="divergence between two channels")
    p.add_argument("--left", required=True, metavar="PATH")
    p.add_argument("--right", required=True, metavar="PATH")
    p.add_argument("--mode", choices=DIVERGENCE_MODES, default="generalized")
    p.add_argument("--kind", choices=("relative", "renyi", "petz", "max"), default="relative")
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("choi-suite", parents=[common], help="entropy functions of the Choi state")
    p.add_argument("--channel", required=True, metavar="PATH")
    p.add_argument("--alpha", type=float, required=True)

    p = sub.add_parser("bosonic", parents=[common], help="Gaussian channel entropies")
    p.add_argument("--family", choices=("thermal", "amplifier", "additive_noise"), required=True)
    p.add_argument("--eta", type=float)
    p.add_argument("--gain", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--nb", type=float, default=0.0)
    p.add_argument("--ns", type=float)
    p.add_argument("--unconstrained", action="store_true")

    p = sub.add_parser("sweep", parents=[common], help="one row per grid point")
    p.add_argument("--quantity", choices=SWEEP_QUANTITIES, required=True)
    p.add_argument("--channel", nargs="+", metavar="PATH")
    p.add_argument("--standard", metavar="KIND", help="standard channel family to sweep")
    p.add_argument("--param", action="append", metavar="NAME=V1,V2", help="grid values (repeatable)")
    p.add_argument("--alphas", metavar="A1,A2", help="comma-separated alpha grid")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")

    p = sub.add_parser("check", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="+", metavar="N", help="run only these criteria")
    return parser


def _policy(args) -> NumericPolicy:
    return NumericPolicy(opt_tol=args.tol, max_iter=args.max_iter, restarts=args.restarts, seed=args.seed)


def _check(args, policy: NumericPolicy, out) -> int:
    numbers = args.only or [n for n, *_ in acceptance.CRITERIA]
    failed = 0
    for n in numbers:
        res = acceptance.run_criterion(n, policy)
        print(res.line(), file=out, flush=True)
        failed += not res.passed
    print(f"{len(numbers) - failed}/{len(numbers)} criteria passed", file=out)
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    sub = "chanent"
    try:
        args = build_parser().parse_args(argv)
        sub = args.subcommand
        policy = _policy(args)
        if sub == "check":
            return _check(args, policy, out)
        if sub in ("entropy", "min-entropy", "ext-min-entropy", "renyi"):
            ch = load_channel(args.channel)
            rows = [_quantity(sub, ch, _channel_label(ch, args.channel), getattr(args, "alpha", None), policy)]
        elif sub == "divergence":
            rows = _divergence(args, policy)
        elif sub == "choi-suite":
            rows = _choi_suite(args, policy)
        elif sub == "bosonic":
            rows = _bosonic(args, policy)
        else:
            rows = _sweep(args, policy)
        if any(math.isnan(r.value) for r in rows):
            raise NumericalError("computation produced NaN")
        out.write(render(rows, args.output))
        return EXIT_OK
    except NumericalError as exc:
        print(f"{sub}: numerical failure: {exc}", file=err)
        return EXIT_NUMERICAL
    except (ChanentError, FileNotFoundError) as exc:
        print(f"{sub}: error: {exc}", file=err)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
