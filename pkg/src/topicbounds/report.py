"""End-to-end pipelines producing a :class:`BoundReport`."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Optional

import numpy as np

from . import bounds
from .bounds import ConfidenceParams
from .corpus import Corpus
from .errors import ParameterError
from .moments import empirical_m2_gmm, empirical_m2_lda
from .spectra import singular_values_symmetric

REPORT_FIELDS = (
    "model",
    "delta_r",
    "sigma1_hat",
    "sigma1_bar",
    "sigmaK_under",
    "delta_prime",
    "k_ref",
    "k_lower",
    "k_upper",
    "sigma1_vacuous",
    "sigmaK_vacuous",
    "k_upper_vacuous",
    "k_upper_capped",
    "monotone",
)


def format_value(value) -> str:
    """Shortest round-trip text for numbers; ``vacuous`` for sentinel infinities."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "vacuous"
        return repr(value)
    return str(value)


@dataclass
class BoundReport:
    """Everything the pipeline inferred about the number of components.

    ``sigma1_bar``, ``sigmaK_under`` and ``delta_prime`` depend on a
    reference count ``k_ref`` (the true K for synthetic data, or the user's
    choice); they are ``None`` when no reference is available.
    """

    model: str
    delta_r: float
    sigma1_hat: float
    k_lower: int
    k_upper: Optional[int]
    confidence: ConfidenceParams
    inputs: dict
    k_ref: Optional[int] = None
    sigma1_bar: Optional[float] = None
    sigmaK_under: Optional[float] = None
    delta_prime: Optional[float] = None
    k_upper_capped: bool = False
    monotone: bool = True
    spectrum: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def sigma1_vacuous(self) -> bool:
        return self.sigma1_bar is not None and math.isinf(self.sigma1_bar)

    @property
    def sigmaK_vacuous(self) -> bool:
        return self.sigmaK_under is not None and self.sigmaK_under == 0.0

    @property
    def k_upper_vacuous(self) -> bool:
        return self.k_upper is None

    def items(self) -> list[tuple[str, str]]:
        rows = [(name, format_value(getattr(self, name))) for name in REPORT_FIELDS]
        rows += [(k, format_value(v)) for k, v in self.confidence.as_dict().items()]
        rows += [(k, format_value(v)) for k, v in self.inputs.items()]
        return rows

    def to_text(self) -> str:
        """Flat ``key=value`` block, one pair per line."""
        return "".join(f"{k}={v}\n" for k, v in self.items())

    def csv_header(self) -> str:
        return ",".join(k for k, _ in self.items()) + "\n"

    def to_csv_row(self) -> str:
        return ",".join(v for _, v in self.items()) + "\n"


def lda_bound_report(
    corpus: Corpus,
    alpha: float,
    beta: float,
    alpha0: Optional[float] = None,
    conf: Optional[ConfidenceParams] = None,
    k_ref: Optional[int] = None,
    k_max: Optional[int] = None,
    per_candidate_alpha0: bool = False,
    mode: str = "split",
    m2_hat: Optional[np.ndarray] = None,
) -> BoundReport:
    """Moments, spectrum and both K bounds for an LDA corpus.

    ``alpha`` is the symmetric per-topic concentration.  The empirical
    moment uses ``alpha0`` when given, else ``k_ref * alpha``.  With
    variable document lengths the concentration bound is evaluated at the
    shortest length.
    """
    conf = conf or ConfidenceParams()
    if alpha0 is None:
        if k_ref is None:
            raise ParameterError("supply alpha0 or a reference K to set alpha0 = K * alpha")
        alpha0 = k_ref * alpha
    if m2_hat is None:
        m2_hat = empirical_m2_lda(corpus, alpha0)
    spectrum = singular_values_symmetric(m2_hat)
    lengths = corpus.lengths
    L = int(lengths.min())
    D, V = corpus.D, corpus.V
    dr = bounds.delta_r_lda(D, L, V, conf.delta)
    scan = bounds.scan_upper_bound_lda(
        float(spectrum[0]), D, L, V, alpha, beta, conf, k_max,
        per_candidate_alpha0=per_candidate_alpha0, corpus=corpus, mode=mode,
    )
    report = BoundReport(
        model="lda",
        delta_r=dr,
        sigma1_hat=float(spectrum[0]),
        k_lower=bounds.k_lower_bound(spectrum, dr),
        k_upper=scan.k_upper,
        confidence=conf,
        inputs={
            "D": D, "L": L, "V": V, "alpha": float(alpha), "beta": float(beta),
            "alpha0": float(alpha0), "variable_lengths": bool(np.any(lengths != L)),
            "alpha0_mode": "per-candidate" if per_candidate_alpha0 else "fixed",
            "coefficient_mode": mode,
        },
        k_ref=k_ref,
        k_upper_capped=scan.capped,
        monotone=scan.monotone,
        spectrum=spectrum,
    )
    if k_ref is not None:
        report.sigma1_bar = bounds.sigma1_upper_lda(k_ref, V, alpha, beta, conf, mode)
        report.sigmaK_under = bounds.sigmaK_lower_lda(k_ref, V, alpha, beta, conf, mode)
        report.delta_prime = bounds.delta_prime(k_ref, V, beta, conf.delta2, conf.delta3)
    return report


def gmm_bound_report(
    points,
    sigma: float,
    sigma_mu: float,
    alpha: float,
    conf: Optional[ConfidenceParams] = None,
    k_ref: Optional[int] = None,
    k_max: Optional[int] = None,
    w_min: Optional[float] = None,
    m2_hat: Optional[np.ndarray] = None,
) -> BoundReport:
    """Moments, spectrum and both K bounds for a spherical GMM sample."""
    conf = conf or ConfidenceParams()
    points = np.asarray(points, dtype=np.float64)
    if m2_hat is None:
        m2_hat = empirical_m2_gmm(points, sigma)
    spectrum = singular_values_symmetric(m2_hat)
    N, m = points.shape
    params = SimpleNamespace(m=m, sigma=sigma, sigma_mu=sigma_mu, alpha=alpha)
    dr = bounds.delta_r_gmm(N, m, sigma, sigma_mu, conf.delta)
    scan = bounds.scan_upper_bound_gmm(float(spectrum[0]), params, N, conf, k_max)
    report = BoundReport(
        model="gmm",
        delta_r=dr,
        sigma1_hat=float(spectrum[0]),
        k_lower=bounds.k_lower_bound(spectrum, dr),
        k_upper=scan.k_upper,
        confidence=conf,
        inputs={"N": N, "m": m, "sigma": float(sigma), "sigma_mu": float(sigma_mu), "alpha": float(alpha)},
        k_ref=k_ref,
        k_upper_capped=scan.capped,
        monotone=scan.monotone,
        spectrum=spectrum,
    )
    if k_ref is not None:
        report.sigma1_bar = bounds.sigma1_upper_gmm(k_ref, m, sigma_mu, alpha, conf)
        if w_min is not None and k_ref <= m:
            report.sigmaK_under = bounds.sigmaK_lower_gmm(w_min, sigma_mu, m, k_ref, conf.t)
    return report
