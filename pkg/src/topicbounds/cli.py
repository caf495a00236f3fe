"""Command-line entry point: ``topicbounds <command> [options]``.

Every command accepts ``--model``, ``--config``, ``--seed`` and ``--out``.
Settings resolve as command-line flag > ``--set KEY=VALUE`` > config file > built-in default.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import formats
from .bounds import COEFFICIENT_MODES, ConfidenceParams
from .config import coerce, merge, parse_assignment, read_config
from .errors import ParameterError, TopicBoundsError
from .moments import empirical_m2_gmm, empirical_m2_lda
from .rand_core import RngState
from .report import format_value, gmm_bound_report, lda_bound_report
from .spectra import singular_values_symmetric
from .sweep import DEFAULTS, FIGURES, PRESETS, SweepConfig, aggregate, format_series, run_sweep, write_sweep_csv
from .synth import GmmParams, LdaParams, generate_gmm_dataset, generate_lda_corpus

# settings exposed as --flags on every command (underscores become dashes)
_PARAM_FLAGS = (
    "D", "L", "V", "K", "N", "m", "alpha", "alpha0", "beta", "sigma", "sigma_mu", "w_min",
    "delta", "delta1", "delta2", "delta3", "t", "k_max", "k_ref",
)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("lda", "gmm"), help="model family (default lda)")
    p.add_argument("--config", type=Path, help="key=value settings file")
    p.add_argument("--seed", help="unsigned 64-bit seed (default 0)")
    p.add_argument("--out", type=Path, help="output path (default: stdout where applicable)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override any setting")
    group = p.add_argument_group("model and confidence parameters")
    for key in _PARAM_FLAGS:
        group.add_argument("--" + key.replace("_", "-"), dest=key, metavar="X")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topicbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a synthetic corpus or GMM dataset with ground truth")
    _add_common(p)

    p = sub.add_parser("moments", help="empirical second-order moment of a dataset")
    p.add_argument("input", type=Path)
    _add_common(p)

    p = sub.add_parser("spectrum", help="singular values of the empirical moment, one per line")
    p.add_argument("input", type=Path)
    p.add_argument("--matrix", action="store_true", help="input is a moment matrix (.bin = binary) rather than data")
    _add_common(p)

    p = sub.add_parser("bounds", help="lower and upper bounds on the number of components")
    p.add_argument("input", type=Path)
    p.add_argument("--format", choices=("text", "csv"), default="text", help="stdout format without --out")
    p.add_argument("--alpha0-mode", dest="alpha0_mode", choices=("fixed", "per-candidate"))
    p.add_argument("--coefficient-mode", dest="coefficient_mode", choices=COEFFICIENT_MODES)
    _add_common(p)

    p = sub.add_parser("sweep", help="run a parameter sweep and write one CSV row per (point, run)")
    p.add_argument("--experiment", help=f"preset ({', '.join(PRESETS)}) or a label for the random streams")
    p.add_argument("--sweep", help="name of the swept parameter")
    p.add_argument("--values", help="comma list or geom:lo:hi[:ratio]")
    p.add_argument("--runs")
    p.add_argument("--jobs")
    p.add_argument("--sample", help="false skips data sampling (structure-only columns)")
    p.add_argument("--alpha0-mode", dest="alpha0_mode", choices=("fixed", "per-candidate"))
    p.add_argument("--coefficient-mode", dest="coefficient_mode", choices=COEFFICIENT_MODES)
    _add_common(p)

    p = sub.add_parser("plotdata", help="mean over runs of each curve of a figure from a sweep CSV")
    p.add_argument("input", type=Path)
    p.add_argument("--figure", required=True, choices=sorted(FIGURES))
    _add_common(p)
    return parser


def _settings(args) -> dict:
    """Typed settings with flag > file > default precedence (defaults applied by callers)."""
    file_layer = read_config(args.config) if args.config else {}
    set_layer = dict(parse_assignment(a) for a in args.set)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "out", "set", "input",
                                                                   "format", "matrix", "figure")}
    raw = merge(file_layer, set_layer, flags)
    return {k: coerce(k, v) for k, v in raw.items()}


def _model(s) -> str:
    model = s.get("model", "lda")
    if model not in DEFAULTS:
        raise ParameterError(f"model must be 'lda' or 'gmm', got {model!r}")
    return model


def _with_defaults(s, model) -> dict:
    return merge(DEFAULTS[model], s)


def _conf(s) -> ConfidenceParams:
    delta = s.get("delta", 0.05)
    third = delta / 3
    return ConfidenceParams(delta, s.get("delta1", third), s.get("delta2", third), s.get("delta3", third), s.get("t"))


def _suffixed(path: Path, suffix: str) -> Path:
    return path.with_name(path.name + suffix)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_generate(args, s) -> None:
    if args.out is None:
        raise ParameterError("generate needs --out")
    model = _model(s)
    p = _with_defaults(s, model)
    rng = RngState(s.get("seed", 0))
    if model == "lda":
        params = LdaParams(p["K"], p["V"], p["alpha"], p["beta"])
        corpus, truth = generate_lda_corpus(params, p["D"], p["L"], rng)
        formats.write_uci(corpus, args.out)
        formats.write_matrix_text(truth.topics, _suffixed(args.out, ".topics.txt"))
        formats.write_matrix_text(truth.mixings, _suffixed(args.out, ".mixings.txt"))
    else:
        params = GmmParams(p["K"], p["m"], p["sigma"], p["sigma_mu"], p["alpha"])
        ds = generate_gmm_dataset(params, p["N"], rng)
        formats.write_matrix_text(ds.points, args.out)
        formats.write_matrix_text(ds.means, _suffixed(args.out, ".means.txt"))
        formats.write_matrix_text(ds.weights[None, :], _suffixed(args.out, ".weights.txt"))


def _lda_alpha0(p, s) -> float:
    if "alpha0" in s:
        return s["alpha0"]
    if "K" in s:
        return s["K"] * p["alpha"]
    raise ParameterError("the LDA moment needs --alpha0, or --K to use alpha0 = K * alpha")


def _empirical_moment(args, s) -> np.ndarray:
    model = _model(s)
    p = _with_defaults(s, model)
    if model == "lda":
        return empirical_m2_lda(formats.read_uci(args.input), _lda_alpha0(p, s))
    return empirical_m2_gmm(formats.read_matrix_text(args.input), p["sigma"])


def cmd_moments(args, s) -> None:
    m2 = _empirical_moment(args, s)
    if args.out is None:
        formats.write_matrix_text(m2, sys.stdout)
        return
    formats.write_matrix_text(m2, args.out)
    formats.write_matrix_binary(m2, _suffixed(args.out, ".bin"))


def cmd_spectrum(args, s) -> None:
    if args.matrix:
        reader = formats.read_matrix_binary if args.input.suffix == ".bin" else formats.read_matrix_text
        m2 = reader(args.input)
    else:
        m2 = _empirical_moment(args, s)
    values = singular_values_symmetric(m2)
    _emit("".join(format_value(float(v)) + "\n" for v in values), args.out)


def cmd_bounds(args, s) -> None:
    model = _model(s)
    p = _with_defaults(s, model)
    conf = _conf(s)
    k_ref = s.get("k_ref", s.get("K"))
    if model == "lda":
        corpus = formats.read_uci(args.input)
        report = lda_bound_report(
            corpus, p["alpha"], p["beta"], alpha0=s.get("alpha0"), conf=conf, k_ref=k_ref,
            k_max=s.get("k_max"), per_candidate_alpha0=s.get("alpha0_mode") == "per-candidate",
            mode=s.get("coefficient_mode", "split"),
        )
    else:
        points = formats.read_matrix_text(args.input)
        report = gmm_bound_report(
            points, p["sigma"], p["sigma_mu"], p["alpha"], conf=conf, k_ref=k_ref,
            k_max=s.get("k_max"), w_min=s.get("w_min"),
        )
    text = report.to_text()
    csv_text = report.csv_header() + report.to_csv_row()
    if args.out is None:
        sys.stdout.write(csv_text if args.format == "csv" else text)
    else:
        _emit(text, args.out)
        _emit(csv_text, _suffixed(args.out, ".csv"))


def cmd_sweep(args, s) -> None:
    cfg = SweepConfig.from_settings(s)
    rows = run_sweep(cfg)
    if args.out is None:
        write_sweep_csv(rows, sys.stdout)
    else:
        write_sweep_csv(rows, args.out)


def cmd_plotdata(args, s) -> None:
    swept, curves, points = aggregate(args.input, args.figure)
    if args.out is None:
        sys.stdout.write(format_series(swept, curves, points))
        return
    for curve in curves:
        _emit(format_series(swept, curves, points, curve), _suffixed(args.out, f".{curve}.txt"))


COMMANDS = {
    "generate": cmd_generate,
    "moments": cmd_moments,
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "plotdata": cmd_plotdata,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    warnings.formatwarning = lambda msg, category, *rest, **kw: f"topicbounds: {category.__name__}: {msg}\n"
    try:
        COMMANDS[args.command](args, _settings(args))
    except ParameterError as exc:
        print(f"topicbounds {args.command}: {exc}", file=sys.stderr)
        return 2
    except (TopicBoundsError, OSError) as exc:
        print(f"topicbounds {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
