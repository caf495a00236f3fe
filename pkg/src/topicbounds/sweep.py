"""Parameter sweeps over synthetic data and per-figure aggregation of their CSV.

A sweep varies exactly one parameter over an increasing grid and, for every
(grid point, run), samples ground truth and data from streams addressed by
``(experiment, ...)`` labels, so the output depends only on the settings and
the seed.  Topics (or mixture components) are keyed by the parameters that
shape them, which keeps them fixed across a sweep over D, L or N.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import bounds
from .bounds import COEFFICIENT_MODES, ConfidenceParams
from .config import coerce, merge
from .errors import FormatError, ParameterError, TopicBoundsError
from .moments import empirical_m2_gmm, empirical_m2_lda, residual
from .rand_core import RngState, dirichlet_sample, stream_id
from .report import format_value, gmm_bound_report, lda_bound_report
from .spectra import singular_values_symmetric
from .synth import (
    GmmParams,
    LdaParams,
    draw_topics,
    generate_gmm_dataset,
    generate_lda_corpus,
    true_second_moment_gmm,
    true_second_moment_lda,
)

__all__ = [
    "SWEEP_COLUMNS",
    "PRESETS",
    "FIGURES",
    "SweepConfig",
    "parse_values",
    "run_sweep",
    "write_sweep_csv",
    "aggregate",
    "format_series",
]

SWEEP_COLUMNS = (
    "swept_name",
    "swept_value",
    "run_index",
    "frob_R",
    "spec_R",
    "delta_r",
    "sv_K",
    "sv_K_plus_1",
    "sigma1_hat",
    "sigma1_bar",
    "sigmaK_under",
    "k_lower",
    "k_upper",
    "sv1_true",
    "svK_true",
    "sigma1_vacuous",
    "sigmaK_vacuous",
    "k_upper_vacuous",
    "k_upper_capped",
    "error",
)

MODEL_PARAMS = {
    "lda": ("D", "L", "V", "K", "alpha", "beta"),
    "gmm": ("N", "m", "K", "sigma", "sigma_mu", "alpha"),
}

DEFAULTS = {
    "lda": {"D": 2000, "L": 500, "V": 1000, "K": 10, "alpha": 1.0, "beta": 0.1},
    "gmm": {"N": 50000, "m": 20, "K": 5, "sigma": 0.5, "sigma_mu": 2.0, "alpha": 1.0},
}

# Grids double from the low end and finish on the high end.
PRESETS = {
    "a": {"model": "lda", "sweep": "L", "values": "geom:50:3200", "D": "2000", "V": "1000"},
    "b": {"model": "lda", "sweep": "D", "values": "geom:100:12800", "L": "500", "V": "1000"},
    "c": {"model": "lda", "sweep": "V", "values": "geom:100:3000", "L": "500", "D": "2000"},
    "d": {"model": "lda", "sweep": "beta", "values": "geom:0.01:5", "V": "1000", "K": "10", "sample": "false"},
    "e": {"model": "lda", "sweep": "K", "values": "geom:5:100", "V": "1000", "beta": "0.1", "sample": "false"},
    "f": {"model": "lda", "sweep": "V", "values": "geom:200:3000", "K": "10", "beta": "0.1", "sample": "false"},
    "fig2a": {"model": "lda", "sweep": "D", "values": "geom:100:12800", "K": "10", "L": "500", "V": "1000"},
    "fig2b": {"model": "lda", "sweep": "D", "values": "geom:100:12800", "K": "20", "L": "500", "V": "1000"},
    "fig2c": {"model": "lda", "sweep": "L", "values": "geom:50:3200", "K": "10", "D": "2000", "V": "1000"},
}

_RESIDUAL_CURVES = ("frob_R", "spec_R", "delta_r", "sv_K", "sv_K_plus_1")
_STRUCTURE_CURVES = ("sv1_true", "sigma1_bar", "svK_true", "sigmaK_under")
_K_CURVES = ("k_lower", "k_upper")

FIGURES = {
    "1a": _RESIDUAL_CURVES,
    "1b": _RESIDUAL_CURVES,
    "1c": _RESIDUAL_CURVES,
    "1d": _STRUCTURE_CURVES,
    "1e": _STRUCTURE_CURVES,
    "1f": _STRUCTURE_CURVES,
    "2a": _K_CURVES,
    "2b": _K_CURVES,
    "2c": _K_CURVES,
}


def _tidy(x: float) -> float:
    # 0.01 * 2**k picks up representation noise; 12 significant digits is plenty for a grid
    return float(f"{x:.12g}")


def parse_values(text: str, name: str) -> tuple:
    """Grid from ``"v1,v2,..."`` or ``"geom:lo:hi[:ratio]"`` (ratio defaults to 2)."""
    text = text.strip()
    if text.startswith("geom:"):
        parts = text.split(":")[1:]
        if len(parts) not in (2, 3):
            raise ParameterError(f"geometric grid must be geom:lo:hi[:ratio], got {text!r}")
        lo, hi = float(parts[0]), float(parts[1])
        ratio = float(parts[2]) if len(parts) == 3 else 2.0
        if not (lo > 0 and hi >= lo and ratio > 1):
            raise ParameterError(f"need 0 < lo <= hi and ratio > 1 in {text!r}")
        raw = []
        x = lo
        while x < hi * (1 - 1e-12):
            raw.append(_tidy(x))
            x *= ratio
        raw.append(_tidy(hi))
        items = [str(v) for v in raw]
    else:
        items = [s for s in (p.strip() for p in text.split(",")) if s]
    values = tuple(coerce(name, item) for item in items)
    if not values:
        raise ParameterError("sweep value list is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ParameterError(f"sweep values must be strictly increasing: {values}")
    return values


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved settings of one sweep."""

    model: str
    sweep: str
    values: tuple
    fixed: dict
    runs: int = 5
    seed: int = 0
    experiment: str = "custom"
    sample: bool = True
    conf: ConfidenceParams = field(default_factory=ConfidenceParams)
    k_max: Optional[int] = None
    alpha0_mode: str = "fixed"
    coefficient_mode: str = "split"
    jobs: int = 1

    @classmethod
    def from_settings(cls, *layers: dict) -> "SweepConfig":
        """Build from settings layers, lowest precedence first.

        If the effective ``experiment`` names a preset, the preset sits
        beneath every layer; any other name only labels the random streams.
        """
        typed = [{k: coerce(k, v) for k, v in layer.items() if v is not None} for layer in layers]
        exp = merge(*typed).get("experiment")
        if exp in PRESETS:
            typed.insert(0, {k: coerce(k, v) for k, v in PRESETS[exp].items()})
        s = merge(*typed)

        model = s.get("model", "lda")
        if model not in MODEL_PARAMS:
            raise ParameterError(f"model must be 'lda' or 'gmm', got {model!r}")
        name = s.get("sweep")
        if name is None:
            raise ParameterError("no swept parameter: set sweep=<name> or choose an experiment preset")
        if name not in MODEL_PARAMS[model]:
            raise ParameterError(f"cannot sweep {name!r} for {model}; choose one of {MODEL_PARAMS[model]}")
        if "values" not in s:
            raise ParameterError("sweep values missing")
        values = parse_values(s["values"], name)
        fixed = {k: s.get(k, DEFAULTS[model][k]) for k in MODEL_PARAMS[model] if k != name}

        delta = s.get("delta", 0.05)
        third = delta / 3
        conf = ConfidenceParams(
            delta, s.get("delta1", third), s.get("delta2", third), s.get("delta3", third), s.get("t")
        )
        runs = s.get("runs", 5)
        if runs < 1:
            raise ParameterError("runs must be >= 1")
        jobs = s.get("jobs", 1)
        if jobs < 1:
            raise ParameterError("jobs must be >= 1")
        alpha0_mode = s.get("alpha0_mode", "fixed")
        if alpha0_mode not in ("fixed", "per-candidate"):
            raise ParameterError("alpha0_mode must be 'fixed' or 'per-candidate'")
        mode = s.get("coefficient_mode", "split")
        if mode not in COEFFICIENT_MODES:
            raise ParameterError(f"coefficient_mode must be one of {COEFFICIENT_MODES}")
        seed = s.get("seed", 0)
        RngState(seed)  # range check
        return cls(
            model=model,
            sweep=name,
            values=values,
            fixed=fixed,
            runs=runs,
            seed=seed,
            experiment=s.get("experiment", "custom"),
            sample=s.get("sample", True),
            conf=conf,
            k_max=s.get("k_max"),
            alpha0_mode=alpha0_mode,
            coefficient_mode=mode,
            jobs=jobs,
        )

    def point_params(self, value) -> dict:
        p = dict(self.fixed)
        p[self.sweep] = value
        return p


def _topic_state(cfg: SweepConfig, run: int, *shape) -> RngState:
    return RngState(cfg.seed, stream_id(cfg.experiment, "truth", run, *shape))


def _data_state(cfg: SweepConfig, value, run: int) -> RngState:
    return RngState(cfg.seed, stream_id(cfg.experiment, cfg.sweep, value, run))


def _sv_at(spectrum, i):
    # index i (0-based) of a descending spectrum; past the end the value is 0
    return float(spectrum[i]) if i < len(spectrum) else 0.0


def _lda_row(cfg: SweepConfig, value, run: int) -> dict:
    p = cfg.point_params(value)
    K, V, alpha, beta = p["K"], p["V"], p["alpha"], p["beta"]
    params = LdaParams(K, V, alpha, beta)
    topics = draw_topics(params, _topic_state(cfg, run, K, V, beta))
    m2 = true_second_moment_lda(topics, alpha)
    true_sv = singular_values_symmetric(m2)
    row = {
        "sv1_true": _sv_at(true_sv, 0),
        "svK_true": _sv_at(true_sv, K - 1),
        "sigma1_bar": bounds.sigma1_upper_lda(K, V, alpha, beta, cfg.conf, cfg.coefficient_mode),
        "sigmaK_under": bounds.sigmaK_lower_lda(K, V, alpha, beta, cfg.conf, cfg.coefficient_mode),
    }
    if not cfg.sample:
        return row
    corpus, _ = generate_lda_corpus(params, p["D"], p["L"], _data_state(cfg, value, run), topics=topics)
    m2_hat = empirical_m2_lda(corpus, params.alpha0)
    _, norms = residual(m2_hat, m2)
    rep = lda_bound_report(
        corpus, alpha, beta, alpha0=params.alpha0, conf=cfg.conf, k_ref=K, k_max=cfg.k_max,
        per_candidate_alpha0=cfg.alpha0_mode == "per-candidate", mode=cfg.coefficient_mode, m2_hat=m2_hat,
    )
    return _with_report(row, rep, norms, K)


def _gmm_row(cfg: SweepConfig, value, run: int) -> dict:
    p = cfg.point_params(value)
    K, m, sigma_mu, alpha = p["K"], p["m"], p["sigma_mu"], p["alpha"]
    params = GmmParams(K, m, p["sigma"], sigma_mu, alpha)
    truth = _topic_state(cfg, run, K, m, sigma_mu, alpha)
    means = sigma_mu * truth.child("means").generator().standard_normal((K, m))
    weights = dirichlet_sample(np.full(K, alpha), truth.child("weights"))
    m2 = true_second_moment_gmm(means, weights)
    true_sv = singular_values_symmetric(m2)
    w_min = float(weights.min())
    row = {
        "sv1_true": _sv_at(true_sv, 0),
        "svK_true": _sv_at(true_sv, K - 1),
        "sigma1_bar": bounds.sigma1_upper_gmm(K, m, sigma_mu, alpha, cfg.conf),
        "sigmaK_under": bounds.sigmaK_lower_gmm(w_min, sigma_mu, m, K, cfg.conf.t),
    }
    if not cfg.sample:
        return row
    ds = generate_gmm_dataset(params, p["N"], _data_state(cfg, value, run), means=means, weights=weights)
    m2_hat = empirical_m2_gmm(ds.points, params.sigma)
    _, norms = residual(m2_hat, m2)
    rep = gmm_bound_report(
        ds.points, params.sigma, sigma_mu, alpha, conf=cfg.conf, k_ref=K, k_max=cfg.k_max,
        w_min=w_min, m2_hat=m2_hat,
    )
    return _with_report(row, rep, norms, K)


def _with_report(row, rep, norms, K):
    row.update(
        frob_R=norms.frobenius,
        spec_R=norms.spectral,
        delta_r=rep.delta_r,
        sv_K=_sv_at(rep.spectrum, K - 1),
        sv_K_plus_1=_sv_at(rep.spectrum, K),
        sigma1_hat=rep.sigma1_hat,
        k_lower=rep.k_lower,
        k_upper=rep.k_upper,
        k_upper_capped=rep.k_upper_capped,
        k_upper_vacuous=rep.k_upper is None,
    )
    return row


def _run_point(task) -> list:
    cfg, value, run = task
    base = {"swept_name": cfg.sweep, "swept_value": value, "run_index": run}
    try:
        with warnings.catch_warnings():
            # vacuity and monotonicity are recorded in the row's flag columns
            warnings.simplefilter("ignore", bounds.VacuousBoundWarning)
            warnings.simplefilter("ignore", bounds.MonotonicityWarning)
            row = (_lda_row if cfg.model == "lda" else _gmm_row)(cfg, value, run)
    except (TopicBoundsError, ArithmeticError, MemoryError) as exc:
        row = {"error": f"{type(exc).__name__}: {exc}"}
    row.update(base)
    if "sigma1_bar" in row:
        row["sigma1_vacuous"] = math.isinf(row["sigma1_bar"])
        row["sigmaK_vacuous"] = row["sigmaK_under"] == 0.0
    return [format_value(row.get(col)) for col in SWEEP_COLUMNS]


def _tasks(cfg: SweepConfig):
    return [(cfg, value, run) for value in cfg.values for run in range(cfg.runs)]


def run_sweep(cfg: SweepConfig) -> list[list[str]]:
    """Formatted CSV cells, one list per (point, run) in canonical order.

    A failing point produces a row whose ``error`` cell names the exception
    and whose numeric cells are empty; the sweep carries on.
    """
    tasks = _tasks(cfg)
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_run_point, tasks))
    return [_run_point(t) for t in tasks]


def write_sweep_csv(rows: Iterable[list[str]], out) -> None:
    """Header plus rows, UTF-8, LF endings; ``out`` is a path or text stream."""
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_sweep_csv(rows, fh)
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    writer.writerows(rows)


def _cell_number(text: str) -> Optional[float]:
    if text in ("", "vacuous"):
        return None
    try:
        x = float(text)
    except ValueError:
        return None
    return x if math.isfinite(x) else None


def aggregate(source, figure: str):
    """Mean over runs of each curve of ``figure`` at every swept value.

    ``source`` is a CSV path or its text.  Returns ``(swept_name, curves,
    points)`` where ``points`` is a list of ``(value_text, [(mean, n), ...])``
    and ``n`` counts the runs contributing a finite value (vacuous and failed
    runs are skipped; ``mean`` is None when ``n == 0``).
    """
    if figure not in FIGURES:
        raise ParameterError(f"unknown figure {figure!r}; known: {', '.join(FIGURES)}")
    curves = FIGURES[figure]
    if isinstance(source, Path) or (isinstance(source, str) and source and "\n" not in source and Path(source).exists()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        return "swept_value", curves, []
    missing = [c for c in ("swept_name", "swept_value", *curves) if c not in header]
    if missing:
        raise FormatError(f"CSV lacks columns {missing} needed for figure {figure}", line=1)
    col = {name: i for i, name in enumerate(header)}
    swept_name = None
    order, sums = [], {}
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(header):
            raise FormatError(f"expected {len(header)} cells, found {len(cells)}", line=lineno)
        name = cells[col["swept_name"]]
        if swept_name is None:
            swept_name = name
        elif name != swept_name:
            raise FormatError(f"mixed swept parameters {swept_name!r} and {name!r}", line=lineno)
        key = cells[col["swept_value"]]
        if key not in sums:
            order.append(key)
            sums[key] = [[0.0, 0] for _ in curves]
        for acc, curve in zip(sums[key], curves):
            x = _cell_number(cells[col[curve]])
            if x is not None:
                acc[0] += x
                acc[1] += 1
    points = [
        (key, [(s / n if n else None, n) for s, n in sums[key]])
        for key in sorted(order, key=float)
    ]
    return swept_name or "swept_value", curves, points


def format_series(swept_name, curves, points, curve: Optional[str] = None) -> str:
    """Whitespace-separated columns with a header line.

    With ``curve`` only that series is written, followed by its run count.
    """
    if curve is None:
        lines = [" ".join((swept_name,) + tuple(curves))]
        for key, stats in points:
            lines.append(" ".join([key] + [format_value(mean) or "nan" for mean, _ in stats]))
    else:
        j = curves.index(curve)
        lines = [f"{swept_name} {curve} n"]
        for key, stats in points:
            mean, n = stats[j]
            lines.append(f"{key} {format_value(mean) or 'nan'} {n}")
    return "\n".join(lines) + "\n"
