"""Command line interface.

Every subcommand writes one single-line JSON record (or CSV for ``sweep``)
to stdout or ``--out``.  Exit codes: 0 success, 1 verification failure,
2 usage error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from ._backend import BACKEND
from .counting import CountingError, TieError, count, near_points_list
from .curves import CurveError, dual_curve, dual_eval, double_dual_residual, parse_curve_spec, parse_interval
from .harmonic import (
    ResourceError,
    SequenceSample,
    StationaryPointError,
    curve_sequence,
    discrepancy,
    erdos_turan_bound,
    exp_sum,
    oscillatory_integral,
    poisson_expansion,
    star_discrepancy,
    stationary_phase,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_delta(text: str):
    """Decimal (float) or ``p/q`` (exact ``Fraction``) delta in (0, 1/2]."""
    try:
        value = Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad delta {text!r}")
    if not (0 < value <= Fraction(1, 2)):
        raise argparse.ArgumentTypeError("delta must lie in (0, 1/2]")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")


def _delta_list(text: str) -> list:
    return [parse_delta(t.strip()) for t in text.split(",") if t.strip()]


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    out_path: str | None = None

    def canonical(self) -> str:
        parts = [self.subcommand]
        for key in sorted(self.options):
            v = self.options[key]
            if v is None or v is False:
                continue
            if isinstance(v, list):
                v = ",".join(str(x) for x in v)
            parts.append(f"--{key}" if v is True else f"--{key}={v}")
        parts.append(f"--seed={self.seed}")
        return " ".join(parts)


def _curve_args(p, default_interval="1,2"):
    p.add_argument("--curve", default="parabola:a=1,b=0,c=0",
                   help="family:key=val,... (families: parabola, power, circle-arc, "
                        "exponential, logarithm, cubic, fermat)")
    p.add_argument("--interval", default=default_interval, help="LO,HI")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nearcurve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nearcurve {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1, help="0 = auto")
        p.add_argument("--out", dest="out_path")

    p = sub.add_parser("count", help="count rational points near a curve")
    _curve_args(p)
    p.add_argument("--Q", type=_positive, required=True)
    p.add_argument("--delta", type=parse_delta, required=True)
    p.add_argument("--mode", choices=["raw", "reduced", "tilde"], default="raw")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--list", type=int, default=0, metavar="K")
    common(p)

    p = sub.add_parser("dual", help="evaluate the dual curve")
    _curve_args(p)
    p.add_argument("--y", type=float)
    p.add_argument("--residual", type=int, default=0, metavar="GRID_N")
    common(p)

    p = sub.add_parser("oscint", help="oscillatory integral int_I e(q(k f - j x))")
    _curve_args(p)
    p.add_argument("--k", type=_positive, default=1)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--q", type=_positive, required=True)
    p.add_argument("--method", choices=["direct", "stationary", "both"], default="direct")
    common(p)

    p = sub.add_parser("expsum", help="exponential sum over a/q in I")
    _curve_args(p)
    p.add_argument("--k", type=_positive, default=1)
    p.add_argument("--q", type=_positive, required=True)
    p.add_argument("--poisson", action="store_true", help="also evaluate the Poisson side")
    common(p)

    for name in ("et-bound", "discrepancy"):
        p = sub.add_parser(name)
        _curve_args(p)
        p.add_argument("--Q", type=_positive, default=200)
        p.add_argument("--sequence", choices=["curve", "sqrt2"], default="curve")
        p.add_argument("--N", type=_positive, default=10_000)
        p.add_argument("--alpha", type=float, default=-0.1)
        p.add_argument("--beta", type=float, default=0.1)
        if name == "et-bound":
            p.add_argument("--K", type=_positive, default=100)
        common(p)

    p = sub.add_parser("sweep", help="run an experiment grid and write CSV")
    _curve_args(p)
    p.add_argument("--experiment", required=True,
                   choices=["asymptotic", "sandwich", "floor", "discrepancy", "sp-error"])
    p.add_argument("--mode", choices=["raw", "reduced", "tilde"], default="reduced")
    p.add_argument("--Q-list", dest="Q_list", type=_int_list, default=[500, 1000, 2000, 4000])
    p.add_argument("--delta", type=parse_delta, default=Fraction(1, 5))
    p.add_argument("--delta-list", dest="delta_list", type=_delta_list)
    p.add_argument("--lambda-list", dest="lambda_list", type=_int_list,
                   default=[100, 1000, 10_000, 100_000])
    p.add_argument("--plot", help="write a log-log SVG chart")
    p.add_argument("--no-timing", action="store_true", help="write wall_ms as 0")
    common(p)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--only")
    common(p)
    return parser


def parse_args(argv: list[str]) -> RunConfig:
    ns = build_parser().parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "seed", "threads", "out_path")}
    return RunConfig(subcommand=ns.subcommand, options=opts, seed=ns.seed,
                     threads=ns.threads, out_path=ns.out_path)


def _curve(cfg: RunConfig):
    return parse_curve_spec(cfg.options["curve"], parse_interval(cfg.options["interval"]))


def _record(cfg: RunConfig, body: dict, wall_ms: float) -> dict:
    rec = dict(body)
    rec.setdefault("ties", 0)
    rec["wall_ms"] = round(wall_ms, 3)
    rec["version"] = __version__
    rec["backend"] = BACKEND
    rec["config"] = cfg.canonical()
    rec["seed"] = cfg.seed
    return rec


def _cx(z: complex) -> list[float]:
    return [z.real, z.imag]


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sample(cfg: RunConfig) -> SequenceSample:
    if cfg.options["sequence"] == "sqrt2":
        from .acceptance import sqrt2_sample

        return sqrt2_sample(cfg.options["N"])
    return curve_sequence(_curve(cfg), cfg.options["Q"])


def run_count(cfg):
    o = cfg.options
    curve = _curve(cfg)
    rep = count(curve, o["Q"], o["delta"], o["mode"], exact=True if o["exact"] else None,
                workers=cfg.threads)
    body = {k: v for k, v in rep.record().items() if k != "wall_ms"}
    if o["list"]:
        pts = near_points_list(curve, o["Q"], o["delta"], o["list"])
        body["points"] = [[p.a, p.b, p.q, p.distance] for p in pts]
    return _record(cfg, body, rep.wall_ms)


def run_dual(cfg):
    o = cfg.options
    curve = _curve(cfg)
    dual = dual_curve(curve)
    body = {"domain": [float(dual.domain.lo), float(dual.domain.hi)]}
    if o["y"] is not None:
        fs, d1, d2 = dual_eval(dual, o["y"])
        body.update({"y": o["y"], "fstar": fs, "fstar_d1": d1, "fstar_d2": d2})
    if o["residual"]:
        body["double_dual_residual"] = double_dual_residual(curve, o["residual"])
    return body


def run_oscint(cfg):
    o = cfg.options
    curve = _curve(cfg)
    body = {"k": o["k"], "j": o["j"], "q": o["q"], "method": o["method"]}
    if o["method"] in ("direct", "both"):
        body["direct"] = _cx(oscillatory_integral(curve, o["k"], o["j"], o["q"]))
    if o["method"] in ("stationary", "both"):
        sp = stationary_phase(curve, o["k"], o["j"], o["q"])
        body.update({"stationary": _cx(sp.value), "x0": sp.x0, "kappa": sp.kappa,
                     "error_budget": sp.error_budget})
    if o["method"] == "both":
        body["abs_diff"] = abs(complex(*body["direct"]) - complex(*body["stationary"]))
    return body


def run_expsum(cfg):
    o = cfg.options
    curve = _curve(cfg)
    s = exp_sum(curve, o["k"], o["q"])
    body = {"k": o["k"], "q": o["q"], "sum": _cx(s)}
    if o["poisson"]:
        p = poisson_expansion(curve, o["k"], o["q"])
        body["poisson"] = _cx(p)
        body["abs_diff"] = abs(s - p)
    return body


def run_et_bound(cfg):
    o = cfg.options
    sample = _sample(cfg)
    B = erdos_turan_bound(sample, o["K"], o["alpha"], o["beta"])
    D = discrepancy(sample, o["alpha"], o["beta"])
    return {"N": sample.N, "K": o["K"], "alpha": o["alpha"], "beta": o["beta"],
            "bound": B, "discrepancy": D, "dominated": abs(D) <= B}


def run_discrepancy(cfg):
    o = cfg.options
    sample = _sample(cfg)
    D = discrepancy(sample, o["alpha"], o["beta"])
    star = star_discrepancy(sample)
    return {"N": sample.N, "alpha": o["alpha"], "beta": o["beta"], "discrepancy": D,
            "star_discrepancy": star, "D_surrogate": 2 * star}


def run_sweep(cfg) -> str:
    from . import experiments as ex

    o = cfg.options
    kind = o["experiment"]
    timing = not o["no_timing"]
    plot = None
    if kind == "asymptotic":
        rows = ex.asymptotic_sweep(_curve(cfg), o["mode"], o["Q_list"], o["delta"],
                                   workers=cfg.threads)
        text = ex.write_csv(rows, ex.ASYMPTOTIC_COLUMNS, timing)
        plot = ({"abs_error": ([r.Q for r in rows], [r.abs_error for r in rows])}, "Q", "|error|")
    elif kind == "sandwich":
        rows = [ex.sandwich_report(_curve(cfg), Q, o["delta"], workers=cfg.threads)
                for Q in o["Q_list"]]
        text = ex.write_csv(rows, ex.SANDWICH_COLUMNS, timing)
    elif kind == "floor":
        spec = o["curve"].split(":")[0]
        fam = "fermat3" if spec.startswith("fermat") else "parabola"
        deltas = o["delta_list"] or [Fraction(1, 10**9)]
        rows = ex.floor_experiment(fam, o["Q_list"], deltas, workers=cfg.threads)
        text = ex.write_csv(rows, ex.FLOOR_COLUMNS, timing)
    elif kind == "discrepancy":
        rows = ex.discrepancy_sweep(_curve(cfg), o["Q_list"])
        text = ex.write_csv(rows, ex.DISCREPANCY_COLUMNS, timing)
        plot = ({"D_surrogate": ([r["N"] for r in rows], [r["D_surrogate"] for r in rows])},
                "N", "D")
    else:
        rows = ex.sp_error_sweep(_curve(cfg), o["lambda_list"])
        text = ex.write_csv(rows, ex.SP_COLUMNS, timing)
        plot = ({"abs_diff": ([r["lambda"] for r in rows], [r["abs_diff"] for r in rows]),
                 "budget": ([r["lambda"] for r in rows], [r["budget"] for r in rows])},
                "lambda", "|diff|")
    if o["plot"]:
        if plot is None:
            raise UsageError(f"--plot is not available for the {kind} experiment")
        series, xl, yl = plot
        with open(o["plot"], "w", encoding="utf-8") as fh:
            fh.write(ex.svg_loglog(series, title=kind, xlabel=xl, ylabel=yl))
    return text


def run_verify(cfg) -> int:
    from .acceptance import CRITERIA, run_all

    only = cfg.options.get("only")
    if only is not None and only not in {n for _, n, _ in CRITERIA} | {str(i) for i, _, _ in CRITERIA}:
        raise UsageError(f"unknown criterion {only!r}; choose from "
                         + ", ".join(n for _, n, _ in CRITERIA))
    results = run_all(quick=cfg.options.get("quick", False), only=only,
                      echo=lambda line: print(line, flush=True))
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


HANDLERS = {
    "count": run_count,
    "dual": run_dual,
    "oscint": run_oscint,
    "expsum": run_expsum,
    "et-bound": run_et_bound,
    "discrepancy": run_discrepancy,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if cfg.subcommand == "verify":
            return run_verify(cfg)
        if cfg.subcommand == "sweep":
            _emit(cfg, run_sweep(cfg))
            return EXIT_OK
        t0 = time.perf_counter()
        rec = HANDLERS[cfg.subcommand](cfg)
        if "wall_ms" not in rec:
            rec = _record(cfg, rec, (time.perf_counter() - t0) * 1e3)
        _emit(cfg, json.dumps(rec, ensure_ascii=False, allow_nan=True) + "\n")
        return EXIT_OK
    except (ResourceError, OverflowError) as exc:
        print(f"nearcurve: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except TieError as exc:
        print(f"nearcurve: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, CurveError, CountingError, StationaryPointError, ValueError) as exc:
        print(f"nearcurve: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
