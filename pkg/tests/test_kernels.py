import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from topicbounds import kernels, synth
from topicbounds.rand_core import RngState

BACKENDS = sorted(kernels.BACKENDS)


def inputs(seed, n=7, L=13, K=4, V=11):
    rng = np.random.default_rng(seed)
    mix = rng.dirichlet(np.ones(K), size=n)
    top = rng.dirichlet(np.full(V, 0.3), size=K)
    topic_cdf = np.cumsum(mix, axis=1)
    topic_cdf /= topic_cdf[:, -1:]
    word_cdf = np.cumsum(top, axis=1)
    word_cdf /= word_cdf[:, -1:]
    return topic_cdf, word_cdf, rng.random((n, L)), rng.random((n, L))


def run(name, topic_cdf, word_cdf, u_topic, u_word):
    n, L = u_topic.shape
    counts = np.zeros((n, word_cdf.shape[1]), dtype=np.int64)
    z = np.zeros((n, L), dtype=np.int32)
    kernels.get_backend(name).sample_word_counts(topic_cdf, word_cdf, u_topic, u_word, counts, z)
    return counts, z


def reference(topic_cdf, word_cdf, u_topic, u_word):
    # index = number of CDF entries <= u, clamped to the last index
    n, L = u_topic.shape
    K, V = word_cdf.shape
    counts = np.zeros((n, V), dtype=np.int64)
    z = np.zeros((n, L), dtype=np.int32)
    for d in range(n):
        for l in range(L):
            k = min(int(np.sum(topic_cdf[d] <= u_topic[d, l])), K - 1)
            v = min(int(np.sum(word_cdf[k] <= u_word[d, l])), V - 1)
            z[d, l] = k
            counts[d, v] += 1
    return counts, z


@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("seed", range(5))
def test_matches_reference(name, seed):
    args = inputs(seed)
    counts, z = run(name, *args)
    want_counts, want_z = reference(*args)
    assert_array_equal(counts, want_counts)
    assert_array_equal(z, want_z)
    assert_array_equal(counts.sum(axis=1), 13)


@pytest.mark.parametrize("name", BACKENDS)
def test_zero_probability_never_drawn(name):
    topic_cdf = np.array([[0.0, 1.0, 1.0]])
    word_cdf = np.array([[0.5, 0.5, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]])
    u = np.array([[0.0, 0.3, 0.999999]])
    counts, z = run(name, topic_cdf, word_cdf, u, u)
    assert_array_equal(z, 1)
    assert_array_equal(counts, [[0, 0, 3]])


def test_backends_agree_on_large_input():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    args = inputs(99, n=300, L=200, K=10, V=500)
    a = run("cython", *args)
    b = run("python", *args)
    assert_array_equal(a[0], b[0])
    assert_array_equal(a[1], b[1])


def test_assignments_optional():
    topic_cdf, word_cdf, ut, uw = inputs(3)
    counts = np.zeros((7, 11), dtype=np.int64)
    kernels.sample_word_counts(topic_cdf, word_cdf, ut, uw, counts, None)
    assert_array_equal(counts, reference(topic_cdf, word_cdf, ut, uw)[0])


def test_unknown_backend():
    with pytest.raises(ImportError):
        kernels.get_backend("fortran")


def test_active_backend_listed():
    assert kernels.BACKEND in kernels.BACKENDS


def test_corpus_identical_under_both_backends(monkeypatch):
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    params = synth.LdaParams(4, 60)
    outs = []
    for name in ("cython", "python"):
        monkeypatch.setattr(kernels, "sample_word_counts", kernels.get_backend(name).sample_word_counts)
        outs.append(synth.generate_lda_corpus(params, 300, 20, RngState(8))[0])
    assert outs[0] == outs[1]


def test_environment_forces_fallback():
    env = dict(os.environ, TOPICBOUNDS_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import topicbounds.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
