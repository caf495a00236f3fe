"""Synthetic LDA corpora and spherical GMM datasets with ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .corpus import Corpus
from .errors import ParameterError
from .rand_core import RngState, _log_gamma_unchecked, _normalize_logs, as_generator, dirichlet_sample

__all__ = [
    "LdaParams",
    "LdaGroundTruth",
    "GmmParams",
    "GmmDataset",
    "draw_topics",
    "generate_lda_corpus",
    "true_second_moment_lda",
    "generate_gmm_dataset",
    "true_second_moment_gmm",
]

# documents sampled per kernel call; does not affect the output
_CHUNK = 256
# points per GMM noise stream; fixes the stream layout of a dataset
_GMM_BLOCK = 4096


def _alpha_vector(alpha, K):
    a = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
    if a.size == 1 and K != 1:
        a = np.full(K, a[0])
    if a.shape != (K,):
        raise ParameterError(f"alpha must be a scalar or have length K={K}")
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ParameterError("alpha entries must be finite and > 0")
    return a


@dataclass(frozen=True)
class LdaParams:
    """Hyperparameters of the LDA generative model.

    ``alpha`` may be given as a scalar (symmetric case) and is stored as a
    length-K tuple.  ``beta`` is the symmetric topic-word concentration.
    """

    K: int
    V: int
    alpha: Union[float, Sequence[float]] = 1.0
    beta: float = 0.1

    def __post_init__(self):
        if int(self.K) < 1:
            raise ParameterError("K must be >= 1")
        if int(self.V) < 2:
            raise ParameterError("V must be >= 2")
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise ParameterError("beta must be finite and > 0")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "V", int(self.V))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "alpha", tuple(_alpha_vector(self.alpha, self.K).tolist()))

    @property
    def alpha0(self) -> float:
        return float(sum(self.alpha))


@dataclass
class LdaGroundTruth:
    topics: np.ndarray
    """(V, K) matrix whose columns are the topic word distributions."""
    mixings: np.ndarray
    """(D, K) per-document topic proportions."""
    assignments: Optional[np.ndarray] = None
    """(D, L) topic of every word slot, only when requested."""


def draw_topics(params: LdaParams, rng) -> np.ndarray:
    """Draw the (V, K) topic matrix, column k from Dir(beta * 1_V)."""
    gen = as_generator(rng)
    return dirichlet_sample(np.full(params.V, params.beta), gen, size=params.K).T.copy()


def _cdf_rows(p):
    c = np.cumsum(p, axis=1)
    return np.ascontiguousarray(c / c[:, -1:])


def generate_lda_corpus(
    params: LdaParams,
    D: int,
    L: int,
    rng: RngState,
    topics: Optional[np.ndarray] = None,
    keep_assignments: bool = False,
) -> tuple[Corpus, LdaGroundTruth]:
    """Sample a corpus of ``D`` documents with ``L`` words each.

    Topics come from the ``"topics"`` sub-stream of ``rng`` unless given.
    Document ``d`` uses its own ``("doc", d)`` sub-stream for the topic
    mixing and the ``2 L`` uniforms that pick topics and words, so output
    does not depend on how documents are batched.
    """
    if not isinstance(rng, RngState):
        raise ParameterError("generate_lda_corpus needs an RngState to derive per-document streams")
    if int(D) < 1:
        raise ParameterError("D must be >= 1")
    if int(L) < 2:
        raise ParameterError("L must be >= 2 (second moments need word pairs)")
    D, L = int(D), int(L)
    if topics is None:
        topics = draw_topics(params, rng.child("topics"))
    else:
        topics = np.asarray(topics, dtype=np.float64)
        if topics.shape != (params.V, params.K):
            raise ParameterError(f"topics must have shape (V, K) = {(params.V, params.K)}")
    alpha = np.asarray(params.alpha)
    # same draws as dirichlet_sample(alpha, gen), minus per-call validation
    small = alpha < 1.0
    any_small = bool(small.any())
    word_cdf = _cdf_rows(topics.T)

    mixings = np.empty((D, params.K))
    assignments = np.empty((D, L), dtype=np.int32) if keep_assignments else None
    blocks = []
    for start in range(0, D, _CHUNK):
        stop = min(D, start + _CHUNK)
        n = stop - start
        u_topic = np.empty((n, L))
        u_word = np.empty((n, L))
        for i, d in enumerate(range(start, stop)):
            gen = rng.child("doc", d).generator()
            mixings[d] = _normalize_logs(_log_gamma_unchecked(alpha, small, any_small, gen, alpha.shape))
            u = gen.random((2, L))
            u_topic[i] = u[0]
            u_word[i] = u[1]
        counts = np.zeros((n, params.V), dtype=np.int64)
        z = assignments[start:stop] if keep_assignments else None
        kernels.sample_word_counts(_cdf_rows(mixings[start:stop]), word_cdf, u_topic, u_word, counts, z)
        blocks.append(Corpus.from_dense(counts))

    corpus = _concat(blocks, params.V)
    return corpus, LdaGroundTruth(topics=topics, mixings=mixings, assignments=assignments)


def _concat(blocks, V):
    offsets = np.cumsum([0] + [b.nnz for b in blocks[:-1]])
    indptr = np.concatenate([[0]] + [b.indptr[1:] + o for b, o in zip(blocks, offsets)])
    return Corpus(
        indptr,
        np.concatenate([b.word_ids for b in blocks]),
        np.concatenate([b.counts for b in blocks]),
        V,
    )


def true_second_moment_lda(topics, alpha) -> np.ndarray:
    """Population moment ``sum_k alpha_k / ((alpha0 + 1) alpha0) mu_k mu_k^T``.

    ``topics`` is (V, K); ``alpha`` a scalar or length-K vector.
    """
    topics = np.asarray(topics, dtype=np.float64)
    if topics.ndim != 2:
        raise ParameterError("topics must be a (V, K) matrix")
    a = _alpha_vector(alpha, topics.shape[1])
    a0 = a.sum()
    weights = a / ((a0 + 1.0) * a0)
    m2 = (topics * weights) @ topics.T
    return 0.5 * (m2 + m2.T)


@dataclass(frozen=True)
class GmmParams:
    """Bayesian spherical GMM: ``mu_k ~ N(0, sigma_mu^2 I)``, ``w ~ Dir(alpha 1_K)``."""

    K: int
    m: int
    sigma: float
    sigma_mu: float
    alpha: float = 1.0

    def __post_init__(self):
        if int(self.K) < 1:
            raise ParameterError("K must be >= 1")
        if int(self.m) < int(self.K):
            raise ParameterError("dimension m must be >= K")
        for name in ("sigma", "sigma_mu", "alpha"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise ParameterError(f"{name} must be finite and > 0")
            object.__setattr__(self, name, float(v))
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "m", int(self.m))


@dataclass
class GmmDataset:
    points: np.ndarray
    weights: np.ndarray
    means: np.ndarray
    """(K, m) component means."""
    assignments: np.ndarray
    params: Optional[GmmParams] = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.points.shape[0]


def generate_gmm_dataset(
    params: GmmParams,
    N: int,
    rng: RngState,
    means: Optional[np.ndarray] = None,
    weights: Optional[np.ndarray] = None,
) -> GmmDataset:
    """Sample ``N`` points from a spherical Gaussian mixture.

    Means and weights are drawn from their priors unless supplied.  Noise
    is drawn in fixed blocks of points, each with its own sub-stream.
    """
    if not isinstance(rng, RngState):
        raise ParameterError("generate_gmm_dataset needs an RngState")
    if int(N) < 1:
        raise ParameterError("N must be >= 1")
    N = int(N)
    K, m = params.K, params.m
    if means is None:
        means = params.sigma_mu * rng.child("means").generator().standard_normal((K, m))
    else:
        means = np.asarray(means, dtype=np.float64)
        if means.shape != (K, m):
            raise ParameterError(f"means must have shape (K, m) = {(K, m)}")
    if weights is None:
        weights = dirichlet_sample(np.full(K, params.alpha), rng.child("weights"))
    else:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (K,) or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-9:
            raise ParameterError("weights must be a length-K probability vector")

    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    u = rng.child("assign").generator().random(N)
    assignments = np.minimum(np.searchsorted(cdf, u, side="right"), K - 1)
    noise = np.empty((N, m))
    for b, start in enumerate(range(0, N, _GMM_BLOCK)):
        stop = min(N, start + _GMM_BLOCK)
        noise[start:stop] = rng.child("noise", b).generator().standard_normal((stop - start, m))
    points = means[assignments] + params.sigma * noise
    return GmmDataset(points=points, weights=weights, means=means, assignments=assignments, params=params)


def true_second_moment_gmm(means, weights) -> np.ndarray:
    """``sum_k w_k mu_k mu_k^T`` for (K, m) ``means``."""
    means = np.atleast_2d(np.asarray(means, dtype=np.float64))
    weights = np.atleast_1d(np.asarray(weights, dtype=np.float64))
    if weights.shape != (means.shape[0],):
        raise ParameterError("need one weight per mean")
    m2 = (means.T * weights) @ means
    return 0.5 * (m2 + m2.T)
