# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels.  Semantics match ``_fallback`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _upper(const double[::1] cdf, double u) noexcept nogil:
    # number of entries <= u, clamped to the last index
    cdef Py_ssize_t lo = 0, hi = cdf.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cdf[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    if lo >= cdf.shape[0]:
        lo = cdf.shape[0] - 1
    return lo


def sample_word_counts(const double[:, ::1] topic_cdf,
                       const double[:, ::1] word_cdf,
                       const double[:, ::1] u_topic,
                       const double[:, ::1] u_word,
                       cnp.int64_t[:, ::1] counts,
                       cnp.int32_t[:, ::1] assignments=None):
    """Accumulate per-document word counts from pre-drawn uniforms.

    topic_cdf : (n, K) per-document cumulative topic mixing
    word_cdf  : (K, V) per-topic cumulative word distribution
    u_topic, u_word : (n, L) uniforms in [0, 1)
    counts    : (n, V) output, incremented in place
    """
    cdef Py_ssize_t n = u_topic.shape[0], L = u_topic.shape[1]
    cdef Py_ssize_t d, l, z, w
    cdef bint keep = assignments is not None
    if topic_cdf.shape[0] != n or u_word.shape[0] != n or counts.shape[0] != n:
        raise ValueError("row counts disagree")
    if u_word.shape[1] != L or counts.shape[1] != word_cdf.shape[1]:
        raise ValueError("column counts disagree")
    if topic_cdf.shape[1] != word_cdf.shape[0]:
        raise ValueError("topic counts disagree")
    with nogil:
        for d in range(n):
            for l in range(L):
                z = _upper(topic_cdf[d], u_topic[d, l])
                w = _upper(word_cdf[z], u_word[d, l])
                counts[d, w] += 1
                if keep:
                    assignments[d, l] = <cnp.int32_t>z
    return counts
