"""Empirical first- and second-order moments and residuals against truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .errors import DataError, ParameterError
from .spectra import singular_values_symmetric

__all__ = [
    "ResidualNorms",
    "empirical_m1",
    "pair_moment",
    "combine_m2",
    "empirical_m2_lda",
    "empirical_m2_gmm",
    "residual",
]

# dense entries per Gram block
_BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class ResidualNorms:
    frobenius: float
    spectral: float


def empirical_m1(corpus: Corpus) -> np.ndarray:
    """Pooled word frequencies: all counts divided by the total word count."""
    total = int(corpus.counts.sum())
    if corpus.D == 0 or total == 0:
        raise DataError("corpus has no words")
    m1 = np.bincount(corpus.word_ids, weights=corpus.counts, minlength=corpus.V)
    return m1 / total


def _integer_gram(corpus: Corpus, docs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``sum_d c_d c_d^T`` and ``sum_d c_d`` over ``docs``, exact in float64.

    Counts are integers, so every partial sum is an exactly representable
    integer (well below 2**53) and the result is independent of blocking.
    """
    V = corpus.V
    gram = np.zeros((V, V))
    colsum = np.zeros(V)
    pos = np.full(corpus.D, -1, dtype=np.int64)
    pos[docs] = np.arange(docs.size)
    entry_pos = pos[corpus.doc_index()]
    step = max(1, _BLOCK_ENTRIES // V)
    for lo in range(0, docs.size, step):
        n = min(step, docs.size - lo)
        sel = np.flatnonzero((entry_pos >= lo) & (entry_pos < lo + n))
        block = np.zeros((n, V))
        block[entry_pos[sel] - lo, corpus.word_ids[sel]] = corpus.counts[sel]
        gram += block.T @ block
        colsum += block.sum(axis=0)
    return gram, colsum


def pair_moment(corpus: Corpus) -> np.ndarray:
    """Average over documents of ``sum_{l != l'} x_l x_l'^T / (L_d (L_d - 1))``.

    Uses ``sum_{l != l'} x_l x_l'^T = c c^T - diag(c)`` for the count vector
    ``c`` of each document.  Documents of different lengths are weighted by
    their own ``1 / (L_d (L_d - 1))``; equal-length documents are pooled
    exactly before the single division.
    """
    if corpus.D == 0:
        raise DataError("corpus has no documents")
    lengths = corpus.lengths
    short = np.flatnonzero(lengths < 2)
    if short.size:
        raise DataError(f"document {int(short[0])} has {int(lengths[short[0]])} words; need >= 2")
    out = np.zeros((corpus.V, corpus.V))
    for L in np.unique(lengths):
        docs = np.flatnonzero(lengths == L)
        gram, colsum = _integer_gram(corpus, docs)
        gram[np.diag_indices_from(gram)] -= colsum
        out += gram / (float(L) * (L - 1))
    out /= corpus.D
    return 0.5 * (out + out.T)


def combine_m2(pair: np.ndarray, m1: np.ndarray, alpha0: float) -> np.ndarray:
    """``pair - alpha0 / (alpha0 + 1) * m1 m1^T``."""
    if not np.isfinite(alpha0) or alpha0 <= 0:
        raise ParameterError("alpha0 must be finite and > 0")
    return pair - (alpha0 / (alpha0 + 1.0)) * np.outer(m1, m1)


def empirical_m2_lda(corpus: Corpus, alpha0: float) -> np.ndarray:
    """Empirical second-order moment of an LDA corpus.

    Parameters
    ----------
    corpus : Corpus
        Documents with at least two words each.
    alpha0 : float
        Sum of the document-topic Dirichlet parameters.

    Returns
    -------
    (V, V) symmetric array.
    """
    if not np.isfinite(alpha0) or alpha0 <= 0:
        raise ParameterError("alpha0 must be finite and > 0")
    return combine_m2(pair_moment(corpus), empirical_m1(corpus), alpha0)


def empirical_m2_gmm(points, sigma: float) -> np.ndarray:
    """``(1/N) sum_i x_i x_i^T - sigma^2 I``; need not be positive semidefinite."""
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("points must be a non-empty (N, m) array")
    if not np.all(np.isfinite(x)):
        raise DataError("points contain non-finite values")
    if not np.isfinite(sigma) or sigma < 0:
        raise ParameterError("sigma must be finite and >= 0")
    m2 = (x.T @ x) / x.shape[0]
    m2 = 0.5 * (m2 + m2.T)
    m2[np.diag_indices_from(m2)] -= sigma**2
    return m2


def residual(empirical, truth) -> tuple[np.ndarray, ResidualNorms]:
    """``R = truth - empirical`` with its Frobenius and spectral norms."""
    empirical = np.asarray(empirical, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if empirical.shape != truth.shape or empirical.ndim != 2:
        raise ParameterError(f"shape mismatch: {empirical.shape} vs {truth.shape}")
    R = truth - empirical
    frob = float(np.sqrt(np.sum(R * R)))
    spec = float(singular_values_symmetric(R)[0]) if R.size else 0.0
    return R, ResidualNorms(frobenius=frob, spectral=spec)
