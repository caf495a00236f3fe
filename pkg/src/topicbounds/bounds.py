"""Closed-form concentration and spectral-structure bounds, and K bounds.

Conventions
-----------
* Logarithms are natural.
* A vacuous upper bound is ``math.inf``; a vacuous lower bound is ``0.0``.
  A vacuous bound on K is ``None``.  Vacuity is never an exception.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from typing import NamedTuple, Optional

import numpy as np

from .errors import ParameterError
from .moments import combine_m2, empirical_m1, pair_moment
from .spectra import count_above_threshold, top_singular_value

__all__ = [
    "ConfidenceParams",
    "MonotonicityWarning",
    "VacuousBoundWarning",
    "VarianceBound",
    "UpperScan",
    "variance_bound_lda",
    "delta_r_lda",
    "delta_prime",
    "sigma1_upper_lda",
    "sigmaK_lower_lda",
    "k_lower_bound",
    "scan_upper_bound_lda",
    "k_upper_bound_lda",
    "delta_r_gmm",
    "sigma1_upper_gmm",
    "sigmaK_lower_gmm",
    "k_bounds_gmm",
    "scan_upper_bound_gmm",
    "gamma_tail_upper",
    "gamma_tail_lower",
    "chi_square_tail_thresholds",
    "gamma_max_min_bounds",
    "dirichlet_max_upper",
    "dirichlet_min_lower",
    "COEFFICIENT_MODES",
]

COEFFICIENT_MODES = ("split", "fixed")
DEFAULT_K_MAX = 200


class MonotonicityWarning(UserWarning):
    """The K-dependent upper-bound curve is not non-increasing over the scan."""


class VacuousBoundWarning(UserWarning):
    """Every candidate in an upper-bound scan was vacuously feasible."""


def _prob(name, value):
    if not (isinstance(value, (int, float, np.floating)) and 0.0 < float(value) < 1.0):
        raise ParameterError(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)


def _positive(name, value, allow_zero=False):
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not (math.isfinite(value) and ok):
        bound = ">= 0" if allow_zero else "> 0"
        raise ParameterError(f"{name} must be finite and {bound}, got {value!r}")
    return value


def _count(name, value, minimum=1):
    if isinstance(value, float) and not value.is_integer():
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class ConfidenceParams:
    """Failure probabilities of the bounds.

    ``delta`` belongs to the Markov concentration bound; ``delta1``..``delta3``
    to the spectral-structure bounds; ``t`` is the Gaussian-matrix deviation
    for GMM and defaults to ``sqrt(2 log(2 / delta3))`` so that
    ``2 exp(-t^2 / 2) = delta3``.
    """

    delta: float = 0.05
    delta1: float = 0.05 / 3
    delta2: float = 0.05 / 3
    delta3: float = 0.05 / 3
    t: Optional[float] = None

    def __post_init__(self):
        for name in ("delta", "delta1", "delta2", "delta3"):
            object.__setattr__(self, name, _prob(name, getattr(self, name)))
        if self.t is None:
            object.__setattr__(self, "t", math.sqrt(2.0 * math.log(2.0 / self.delta3)))
        else:
            object.__setattr__(self, "t", _positive("t", self.t))

    @classmethod
    def from_budget(cls, delta: float, spectral: Optional[float] = None, t=None) -> "ConfidenceParams":
        """Split a single spectral budget evenly into ``delta1 = delta2 = delta3``."""
        budget = delta if spectral is None else spectral
        _prob("spectral budget", budget)
        return cls(delta, budget / 3, budget / 3, budget / 3, t)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# -- LDA concentration ---------------------------------------------------------


class VarianceBound(NamedTuple):
    offdiag: float
    diag: float
    frob_sq: float


def variance_bound_lda(D: int, L: int, V: int) -> VarianceBound:
    """Leading-order bounds on ``E Var[R_ij]`` (higher-order terms dropped).

    ``frob_sq`` sums the entrywise bounds over the V x V matrix, giving the
    bound on ``E ||R||_F^2``.
    """
    D = _count("D", D)
    L = _count("L", L, 2)
    V = _count("V", V, 2)
    tail = 2.0 / (D * float(V) ** 4)
    off = 1.0 / (D * float(L) ** 2 * float(V) ** 2) + tail
    dia = 1.0 / (D * float(L) ** 2 * V) + tail
    return VarianceBound(off, dia, V * (V - 1) * off + V * dia)


def delta_r_lda(D: int, L: int, V: int, delta: float) -> float:
    """Markov bound on ``||M2 - M2_hat||_F`` holding with probability ``1 - delta``."""
    D = _count("D", D)
    L = _count("L", L, 2)
    V = _count("V", V, 2)
    delta = _prob("delta", delta)
    return math.sqrt((2.0 / L**2 + 2.0 / V**2) / (D * delta))


# -- LDA spectral structure ----------------------------------------------------


def _alpha_stats(alpha, K):
    a = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
    if a.size == 1:
        a = np.full(K, a[0])
    if a.shape != (K,) or not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ParameterError(f"alpha must be a positive scalar or length-{K} vector")
    return float(a.min()), float(a.max()), float(a.sum())


def delta_prime(K: int, V: int, beta: float, delta2: float, delta3: float) -> float:
    """Relative deviation used by the matrix Chernoff step; not clamped."""
    K = _count("K", K)
    V = _count("V", V)
    beta = _positive("beta", beta)
    delta2 = _prob("delta2", delta2)
    delta3 = _prob("delta3", delta3)
    inner = math.log(K / delta3) * K * (beta + 2.0 * math.log(K / delta2)) ** 2 / (V * beta)
    return math.sqrt(inner)


def _check_mode(mode):
    if mode not in COEFFICIENT_MODES:
        raise ParameterError(f"mode must be one of {COEFFICIENT_MODES}, got {mode!r}")


def sigma1_upper_lda(K, V, alpha, beta, conf: ConfidenceParams, mode: str = "split") -> float:
    """Upper bound on ``sigma_1(M2)`` for K topics; ``inf`` when vacuous.

    ``mode="split"`` uses the three-way confidence split; ``mode="fixed"``
    fixes the Chernoff deviation at 0.1 and uses ``conf.delta1`` as the
    single Gamma-minimum budget.
    """
    _check_mode(mode)
    K = _count("K", K)
    V = _count("V", V)
    beta = _positive("beta", beta)
    _, a_max, a0 = _alpha_stats(alpha, K)
    vb = V * beta
    gap = vb - math.sqrt(2.0 * vb * math.log(K / conf.delta1))
    if gap <= 0:
        return math.inf
    if mode == "split":
        scale = 1.0 + delta_prime(K, V, beta, conf.delta2, conf.delta3)
    else:
        scale = 1.1
    return a_max / (a0 * (a0 + 1.0)) * scale * V * (beta + K * beta**2) / gap**2


def sigmaK_lower_lda(K, V, alpha, beta, conf: ConfidenceParams, mode: str = "split") -> float:
    """Lower bound on ``sigma_K(M2)``; ``0.0`` when vacuous (deviation >= 1)."""
    _check_mode(mode)
    K = _count("K", K)
    V = _count("V", V)
    beta = _positive("beta", beta)
    a_min, _, a0 = _alpha_stats(alpha, K)
    vb = V * beta
    log_k = math.log(K / conf.delta1)
    if mode == "split":
        shrink = 1.0 - delta_prime(K, V, beta, conf.delta2, conf.delta3)
        denom = (vb + 2.0 * math.sqrt(vb) * log_k) ** 2
    else:
        shrink = 0.9
        denom = (vb + 2.0 * math.sqrt(vb * log_k)) ** 2
    if shrink <= 0:
        return 0.0
    return a_min / (a0 * (a0 + 1.0)) * shrink * vb / denom


# -- K bounds --------------------------------------------------------------------


def k_lower_bound(spectrum, delta_r: float) -> int:
    """Number of singular values above ``delta_r``: with probability
    ``1 - delta`` the true K is at least this."""
    if not math.isfinite(delta_r) or delta_r < 0:
        raise ParameterError("delta_r must be finite and >= 0")
    return count_above_threshold(spectrum, delta_r)


@dataclass
class UpperScan:
    """Outcome of scanning candidate K' = 1..k_max against an upper-bound curve."""

    k_upper: Optional[int]
    candidates: np.ndarray
    thresholds: np.ndarray
    """Right-hand side at each K'; ``inf`` where the bound is vacuous."""
    sigma1_hat: np.ndarray
    feasible: np.ndarray
    monotone: bool
    all_vacuous: bool

    @property
    def vacuous(self) -> bool:
        return self.k_upper is None

    @property
    def capped(self) -> bool:
        """True when the largest candidate was feasible (the scan limit binds)."""
        return bool(self.feasible[-1]) if self.feasible.size else False


def _finish_scan(candidates, thresholds, sigma1_hat, label):
    feasible = sigma1_hat <= thresholds
    # inf - inf is nan; treat vacuous-to-vacuous steps as flat
    with np.errstate(invalid="ignore"):
        steps = np.diff(thresholds)
    monotone = bool(np.all((steps <= 0) | np.isnan(steps)))
    all_vacuous = bool(np.all(np.isinf(thresholds)))
    if all_vacuous:
        warnings.warn(f"{label}: bound vacuous at every candidate K'", VacuousBoundWarning, stacklevel=3)
    elif not monotone:
        warnings.warn(
            f"{label}: bound curve is not non-increasing in K'; reporting the largest feasible K'",
            MonotonicityWarning,
            stacklevel=3,
        )
    idx = np.flatnonzero(feasible)
    k_upper = int(candidates[idx[-1]]) if idx.size else None
    return UpperScan(k_upper, candidates, thresholds, sigma1_hat, feasible, monotone, all_vacuous)


def scan_upper_bound_lda(
    sigma1_hat: Optional[float],
    D: int,
    L: int,
    V: int,
    alpha: float,
    beta: float,
    conf: ConfidenceParams,
    k_max: Optional[int] = None,
    per_candidate_alpha0: bool = False,
    corpus=None,
    mode: str = "split",
) -> UpperScan:
    """Test ``sigma_1(M2_hat) <= sigma1_bar(K') + delta_R`` for K' = 1..k_max.

    ``alpha`` is the per-topic symmetric concentration, so candidate K'
    implies ``alpha0 = K' alpha``.  With ``per_candidate_alpha0`` the
    empirical moment is rebuilt from ``corpus`` for every K' with that
    alpha0; otherwise ``sigma1_hat`` is used for all candidates.
    """
    V = _count("V", V, 2)
    alpha = _positive("alpha", alpha)
    k_max = min(V, DEFAULT_K_MAX) if k_max is None else _count("k_max", k_max)
    dr = delta_r_lda(D, L, V, conf.delta)
    candidates = np.arange(1, k_max + 1)
    thresholds = np.array([sigma1_upper_lda(k, V, alpha, beta, conf, mode) + dr for k in candidates])

    if per_candidate_alpha0:
        if corpus is None:
            raise ParameterError("per_candidate_alpha0 needs the corpus")
        pair = pair_moment(corpus)
        m1 = empirical_m1(corpus)
        s1 = np.array([top_singular_value(combine_m2(pair, m1, k * alpha)) for k in candidates])
    else:
        if sigma1_hat is None:
            raise ParameterError("sigma1_hat is required unless per_candidate_alpha0 is set")
        s1 = np.full(k_max, _positive("sigma1_hat", sigma1_hat, allow_zero=True))
    return _finish_scan(candidates, thresholds, s1, "LDA upper bound on K")


def k_upper_bound_lda(sigma1_hat, D, L, V, alpha, beta, conf, k_max=None,
                      per_candidate_alpha0=False, corpus=None, mode="split") -> Optional[int]:
    """Largest feasible K' of :func:`scan_upper_bound_lda`, or ``None`` if none is."""
    return scan_upper_bound_lda(sigma1_hat, D, L, V, alpha, beta, conf, k_max,
                                per_candidate_alpha0, corpus, mode).k_upper


# -- GMM -------------------------------------------------------------------------


def delta_r_gmm(N: int, m: int, sigma: float, sigma_mu: float, delta: float) -> float:
    """Markov bound on ``||M2 - M2_hat||_F`` for a spherical GMM."""
    N = _count("N", N)
    m = _count("m", m)
    sigma = _positive("sigma", sigma)
    sigma_mu = _positive("sigma_mu", sigma_mu, allow_zero=True)
    delta = _prob("delta", delta)
    return sigma * m / math.sqrt(N * delta) * math.sqrt(2.0 * sigma_mu**2 + (m + 1.0) / m * sigma**2)


def sigma1_upper_gmm(K: int, m: int, sigma_mu: float, alpha: float, conf: ConfidenceParams) -> float:
    """Upper bound on ``sigma_1(M2)`` for K components; ``inf`` when vacuous."""
    K = _count("K", K)
    m = _count("m", m)
    sigma_mu = _positive("sigma_mu", sigma_mu, allow_zero=True)
    alpha = _positive("alpha", alpha)
    denom = alpha - math.sqrt(2.0 * alpha * math.log(1.0 / conf.delta2) / K)
    if denom <= 0:
        return math.inf
    spread = (math.sqrt(m) + math.sqrt(K) + conf.t) ** 2
    return sigma_mu**2 / K * (alpha + 2.0 * math.log(K / conf.delta1)) * spread / denom


def sigmaK_lower_gmm(w_min: float, sigma_mu: float, m: int, K: int, t: float) -> float:
    """``w_min sigma_mu^2 (sqrt(m) - sqrt(K) - t)^2``, clamped to 0 when the base is <= 0."""
    if not (0.0 < float(w_min) <= 1.0):
        raise ParameterError("w_min must lie in (0, 1]")
    sigma_mu = _positive("sigma_mu", sigma_mu, allow_zero=True)
    m = _count("m", m)
    K = _count("K", K)
    t = _positive("t", t)
    if m < K:
        raise ParameterError("need m >= K")
    base = math.sqrt(m) - math.sqrt(K) - t
    if base <= 0:
        return 0.0
    return float(w_min) * sigma_mu**2 * base**2


def _gmm_fields(params):
    try:
        return int(params.m), float(params.sigma), float(params.sigma_mu), float(params.alpha)
    except AttributeError:
        raise ParameterError("params must provide m, sigma, sigma_mu and alpha") from None


def scan_upper_bound_gmm(sigma1_hat: float, params, N: int, conf: ConfidenceParams,
                         k_max: Optional[int] = None) -> UpperScan:
    m, sigma, sigma_mu, alpha = _gmm_fields(params)
    k_max = min(m, DEFAULT_K_MAX) if k_max is None else _count("k_max", k_max)
    dr = delta_r_gmm(N, m, sigma, sigma_mu, conf.delta)
    candidates = np.arange(1, k_max + 1)
    thresholds = np.array([sigma1_upper_gmm(k, m, sigma_mu, alpha, conf) + dr for k in candidates])
    s1 = np.full(k_max, _positive("sigma1_hat", sigma1_hat, allow_zero=True))
    return _finish_scan(candidates, thresholds, s1, "GMM upper bound on K")


def k_bounds_gmm(spectrum, params, N: int, conf: ConfidenceParams,
                 k_max: Optional[int] = None) -> tuple[int, Optional[int]]:
    """``(K_l, K_u)`` for a spherical GMM from the spectrum of its empirical moment.

    ``params`` supplies ``m, sigma, sigma_mu, alpha`` (a :class:`GmmParams`
    works; its K is not used).  ``K_u`` is ``None`` when no candidate is
    feasible.
    """
    m, sigma, sigma_mu, _ = _gmm_fields(params)
    spectrum = np.asarray(spectrum, dtype=np.float64)
    dr = delta_r_gmm(N, m, sigma, sigma_mu, conf.delta)
    k_l = count_above_threshold(spectrum, dr)
    s1 = float(spectrum[0]) if spectrum.size else 0.0
    return k_l, scan_upper_bound_gmm(s1, params, N, conf, k_max).k_upper


# -- Gamma / chi-square / Dirichlet tail bounds ---------------------------------


def gamma_tail_upper(alpha_shape: float, c: float) -> float:
    """Bound on ``Pr(X >= a + c sqrt(a))`` for ``X ~ Gamma(a, 1)``."""
    a = _positive("alpha_shape", alpha_shape)
    c = _positive("c", c, allow_zero=True)
    return math.exp(-(c / 2.0) * min(c / 2.0, math.sqrt(a)))


def gamma_tail_lower(alpha_shape: float, c: float) -> float:
    """Bound on ``Pr(X <= a - c sqrt(a))`` for ``X ~ Gamma(a, 1)``."""
    _positive("alpha_shape", alpha_shape)
    c = _positive("c", c, allow_zero=True)
    return math.exp(-(c**2) / 2.0)


def chi_square_tail_thresholds(dof: int, x: float) -> tuple[float, float]:
    """Thresholds whose upper and lower tail probabilities are each <= exp(-x)."""
    dof = _count("dof", dof)
    x = _positive("x", x, allow_zero=True)
    root = 2.0 * math.sqrt(dof * x)
    return dof + root + 2.0 * x, dof - root


def gamma_max_min_bounds(n: int, alpha_shape: float, c: float) -> tuple[float, float, float, float]:
    """Thresholds ``a +/- c sqrt(a)`` for the max / min of n i.i.d. Gamma(a, 1)
    with union-bound exceedance probabilities (capped at 1)."""
    n = _count("n", n)
    a = _positive("alpha_shape", alpha_shape)
    c = _positive("c", c, allow_zero=True)
    spread = c * math.sqrt(a)
    p_max = min(1.0, n * gamma_tail_upper(a, c))
    p_min = min(1.0, n * gamma_tail_lower(a, c))
    return a + spread, a - spread, p_max, p_min


def _upper_tail_coefficient(shape: float, log_ratio: float) -> float:
    # smallest c >= 0 with (c/2) min(c/2, sqrt(shape)) >= log_ratio
    if log_ratio <= 0:
        return 0.0
    if log_ratio >= shape:
        return 2.0 * log_ratio / math.sqrt(shape)
    return 2.0 * math.sqrt(log_ratio)


def dirichlet_max_upper(n: int, alpha_shape: float, delta1: float, delta2: float) -> float:
    """Bound on the largest coordinate of ``Dir(a 1_n)``, failing w.p. <= delta1 + delta2.

    When ``n > delta1 e^a`` the numerator is ``a + 2 log(n / delta1)``;
    below that the Gamma maximum sits in the sub-Gaussian regime and the
    numerator becomes ``a + 2 sqrt(a log(n / delta1))``.  Returns ``inf``
    when the denominator is non-positive or the bound exceeds 1.
    """
    n = _count("n", n)
    a = _positive("alpha_shape", alpha_shape)
    delta1 = _prob("delta1", delta1)
    delta2 = _prob("delta2", delta2)
    c1 = _upper_tail_coefficient(a, math.log(n / delta1))
    denom = a - math.sqrt(2.0 * a * math.log(1.0 / delta2) / n)
    if denom <= 0:
        return math.inf
    value = (a + c1 * math.sqrt(a)) / (n * denom)
    return value if value <= 1.0 else math.inf


def dirichlet_min_lower(n: int, alpha_shape: float, delta1: float, delta2: float) -> float:
    """Bound on the smallest coordinate of ``Dir(a 1_n)``, failing w.p. <= delta1 + delta2.

    Returns ``0.0`` (vacuous) when the Gamma-minimum threshold
    ``a - sqrt(2 a log(n / delta1))`` is non-positive.
    """
    n = _count("n", n)
    a = _positive("alpha_shape", alpha_shape)
    delta1 = _prob("delta1", delta1)
    delta2 = _prob("delta2", delta2)
    numer = a - math.sqrt(2.0 * a * math.log(n / delta1))
    if numer <= 0:
        return 0.0
    c2 = _upper_tail_coefficient(n * a, math.log(1.0 / delta2))
    denom = n * a + c2 * math.sqrt(n * a)
    return numer / denom
