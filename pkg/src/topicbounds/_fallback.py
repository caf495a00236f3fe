"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def _upper_rows(cdf, u):
    # row-wise searchsorted(side="right") for cdf (n, K) against u (n, L)
    idx = np.zeros(u.shape, dtype=np.int64)
    for k in range(cdf.shape[1]):
        idx += u >= cdf[:, k : k + 1]
    return np.minimum(idx, cdf.shape[1] - 1)


def sample_word_counts(topic_cdf, word_cdf, u_topic, u_word, counts, assignments=None):
    n, L = u_topic.shape
    if topic_cdf.shape[0] != n or u_word.shape[0] != n or counts.shape[0] != n:
        raise ValueError("row counts disagree")
    if u_word.shape[1] != L or counts.shape[1] != word_cdf.shape[1]:
        raise ValueError("column counts disagree")
    if topic_cdf.shape[1] != word_cdf.shape[0]:
        raise ValueError("topic counts disagree")
    K, V = word_cdf.shape
    z = _upper_rows(topic_cdf, u_topic)
    words = np.empty((n, L), dtype=np.int64)
    for k in range(K):
        mask = z == k
        if mask.any():
            w = np.searchsorted(word_cdf[k], u_word[mask], side="right")
            words[mask] = np.minimum(w, V - 1)
    rows = np.repeat(np.arange(n, dtype=np.int64), L)
    flat = np.bincount(rows * V + words.ravel(), minlength=n * V)
    counts += flat.reshape(n, V)
    if assignments is not None:
        assignments[...] = z
    return counts
