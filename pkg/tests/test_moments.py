import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from topicbounds.corpus import Corpus
from topicbounds.errors import DataError, ParameterError
from topicbounds.moments import (
    combine_m2,
    empirical_m1,
    empirical_m2_gmm,
    empirical_m2_lda,
    pair_moment,
    residual,
)
from topicbounds.rand_core import RngState
from topicbounds.synth import (
    GmmParams,
    LdaParams,
    draw_topics,
    generate_gmm_dataset,
    generate_lda_corpus,
    true_second_moment_gmm,
    true_second_moment_lda,
)


def ordered_pair_m2(docs, V, alpha0):
    """Definition-level oracle: explicit sum over ordered word pairs l != l'."""
    pair = np.zeros((V, V))
    total = np.zeros(V)
    for words in docs:
        L = len(words)
        acc = np.zeros((V, V))
        for i in range(L):
            for j in range(L):
                if i != j:
                    acc[words[i], words[j]] += 1.0
        pair += acc / (L * (L - 1))
        np.add.at(total, words, 1.0)
    pair /= len(docs)
    m1 = total / total.sum()
    return pair - alpha0 / (alpha0 + 1) * np.outer(m1, m1)


def random_word_docs(rng, D, L, V, ragged=False):
    return [list(rng.integers(0, V, size=rng.integers(2, L + 1) if ragged else L)) for _ in range(D)]


def corpus_from_words(docs, V):
    return Corpus.from_documents([dict(zip(*np.unique(w, return_counts=True))) for w in docs], V)


class TestFirstMoment:
    def test_single_document(self):
        c = Corpus.from_documents([{0: 1, 1: 2}], V=2)
        assert_allclose(empirical_m1(c), [1 / 3, 2 / 3])

    def test_pooled(self):
        c = Corpus.from_documents([{0: 2}, {1: 2}], V=2)
        assert_allclose(empirical_m1(c), [0.5, 0.5])

    def test_concentrated_topic(self):
        params = LdaParams(1, 30, beta=1e-3)
        corpus, truth = generate_lda_corpus(params, D=2000, L=500, rng=RngState(11))
        mu = truth.topics[:, 0]
        n = 2000 * 500
        se = np.sqrt(mu * (1 - mu) / n)
        assert np.all(np.abs(empirical_m1(corpus) - mu) <= 3 * se + 1e-12)

    def test_empty(self):
        with pytest.raises(DataError):
            empirical_m1(Corpus.from_documents([], V=3))


class TestSecondMomentLda:
    def test_hand_example(self):
        c = Corpus.from_documents([{0: 2}], V=2)
        assert_allclose(pair_moment(c), [[1, 0], [0, 0]])
        assert_allclose(empirical_m2_lda(c, 1.0), [[0.5, 0], [0, 0]])

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_ordered_pair_sum(self, seed):
        rng = np.random.default_rng(seed)
        docs = random_word_docs(rng, D=3, L=4, V=5)
        got = empirical_m2_lda(corpus_from_words(docs, 5), 2.5)
        want = ordered_pair_m2(docs, 5, 2.5)
        assert_allclose(got, want, rtol=1e-14, atol=1e-14 * np.abs(want).max())

    def test_variable_lengths_match_oracle(self):
        rng = np.random.default_rng(99)
        docs = random_word_docs(rng, D=6, L=7, V=6, ragged=True)
        got = empirical_m2_lda(corpus_from_words(docs, 6), 0.7)
        assert_allclose(got, ordered_pair_m2(docs, 6, 0.7), rtol=1e-14, atol=1e-16)

    def test_symmetric(self):
        corpus, _ = generate_lda_corpus(LdaParams(3, 25), D=40, L=9, rng=RngState(1))
        m2 = empirical_m2_lda(corpus, 3.0)
        assert np.max(np.abs(m2 - m2.T)) <= 1e-12 * (1 + np.abs(m2).max())

    def test_independent_of_document_order(self):
        corpus, _ = generate_lda_corpus(LdaParams(3, 25), D=50, L=9, rng=RngState(2))
        perm = np.random.default_rng(0).permutation(corpus.D)
        shuffled = Corpus.from_documents([corpus.document(d) for d in perm], corpus.V)
        assert_array_equal(empirical_m2_lda(corpus, 3.0), empirical_m2_lda(shuffled, 3.0))

    def test_short_document_rejected(self):
        with pytest.raises(DataError):
            empirical_m2_lda(Corpus.from_documents([{0: 2}, {1: 1}], V=2), 1.0)

    @pytest.mark.parametrize("alpha0", [0.0, -1.0, np.inf])
    def test_bad_alpha0(self, alpha0):
        with pytest.raises(ParameterError):
            empirical_m2_lda(Corpus.from_documents([{0: 2}], V=2), alpha0)
        with pytest.raises(ParameterError):
            combine_m2(np.zeros((2, 2)), np.zeros(2), alpha0)

    def test_unbiased_and_root_r_convergence(self):
        # same topics across corpora; mean of R moments approaches the truth like 1/sqrt(R)
        params = LdaParams(5, 50, 1.0, 0.1)
        topics = draw_topics(params, RngState(0, 1))
        truth = true_second_moment_lda(topics, params.alpha)

        def batch(R):
            return np.array([
                empirical_m2_lda(
                    generate_lda_corpus(params, 200, 50, RngState(0).child(f"R{R}", r), topics=topics)[0],
                    params.alpha0,
                )
                for r in range(R)
            ])

        errors = []
        for R in (25, 100, 400):
            stack = batch(R)
            mean = stack.mean(axis=0)
            errors.append(np.linalg.norm(mean - truth))
        se = stack.std(axis=0, ddof=1) / np.sqrt(400)
        assert np.all(np.abs(mean - truth) <= 4 * se)
        assert 1.4 <= errors[0] / errors[1] <= 2.9
        assert 1.4 <= errors[1] / errors[2] <= 2.9


class TestSecondMomentGmm:
    def test_hand_example(self):
        assert_allclose(empirical_m2_gmm([[1.0, 0.0]], 1.0), [[0, 0], [0, -1]])

    def test_zero_sigma_is_scatter(self):
        x = np.random.default_rng(0).normal(size=(30, 4))
        assert_allclose(empirical_m2_gmm(x, 0.0), x.T @ x / 30)

    def test_unbiased(self):
        params = GmmParams(K=3, m=4, sigma=0.5, sigma_mu=1.0)
        means = np.random.default_rng(1).normal(size=(3, 4))
        weights = np.array([0.2, 0.3, 0.5])
        truth = true_second_moment_gmm(means, weights)
        stack = np.array([
            empirical_m2_gmm(generate_gmm_dataset(params, 200, RngState(r), means, weights).points, 0.5)
            for r in range(400)
        ])
        se = stack.std(axis=0, ddof=1) / np.sqrt(400)
        assert np.all(np.abs(stack.mean(axis=0) - truth) <= 4 * se)

    @pytest.mark.parametrize("points", [np.zeros((0, 3)), np.array([[np.nan, 1.0]]), np.zeros(3)])
    def test_bad_points(self, points):
        with pytest.raises(DataError):
            empirical_m2_gmm(points, 1.0)

    def test_bad_sigma(self):
        with pytest.raises(ParameterError):
            empirical_m2_gmm(np.ones((2, 2)), -1.0)


class TestResidual:
    def test_identical(self):
        a = np.random.default_rng(0).normal(size=(4, 4))
        a = a + a.T
        R, norms = residual(a, a)
        assert_array_equal(R, 0)
        assert norms.frobenius == 0 and norms.spectral == 0

    def test_hand_norms(self):
        _, norms = residual(np.zeros((2, 2)), np.diag([3.0, -4.0]))
        assert norms.frobenius == pytest.approx(5.0, rel=1e-15)
        assert norms.spectral == pytest.approx(4.0, rel=1e-15)

    def test_sign_convention(self):
        R, _ = residual(np.eye(2), 3 * np.eye(2))
        assert_allclose(R, 2 * np.eye(2))

    def test_norm_inequalities(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            e = rng.normal(size=(5, 5))
            _, n = residual(np.zeros((5, 5)), e + e.T)
            assert n.spectral <= n.frobenius * (1 + 1e-12)
            assert n.frobenius <= np.sqrt(5) * n.spectral * (1 + 1e-12)

    def test_mismatch(self):
        with pytest.raises(ParameterError):
            residual(np.zeros((2, 2)), np.zeros((3, 3)))
