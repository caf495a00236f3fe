import math
import warnings

import numpy as np
import pytest

from topicbounds.bounds import ConfidenceParams, delta_r_lda
from topicbounds.corpus import Corpus
from topicbounds.errors import ParameterError
from topicbounds.report import REPORT_FIELDS, format_value, gmm_bound_report, lda_bound_report
from topicbounds.rand_core import RngState
from topicbounds.synth import GmmParams, LdaParams, generate_gmm_dataset, generate_lda_corpus


@pytest.fixture(autouse=True)
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


class TestFormatValue:
    @pytest.mark.parametrize(
        "value, text",
        [(None, ""), (True, "true"), (np.bool_(False), "false"), (3, "3"), (np.int64(4), "4"),
         (0.1, "0.1"), (math.inf, "vacuous"), (1e-300, "1e-300"), ("x", "x")],
    )
    def test_cases(self, value, text):
        assert format_value(value) == text

    def test_round_trip(self):
        for x in np.random.default_rng(0).normal(size=50) * 10.0 ** np.arange(-25, 25):
            assert float(format_value(float(x))) == x


class TestLdaReport:
    def test_tiny_corpus(self):
        corpus = Corpus.from_documents([{0: 2, 1: 1}, {2: 3}, {1: 1, 3: 1}], V=4)
        rep = lda_bound_report(corpus, alpha=1.0, beta=0.1, alpha0=2.0)
        assert 0 <= rep.k_lower <= corpus.V
        assert rep.inputs["L"] == 2 and rep.inputs["variable_lengths"] is True
        assert rep.delta_r == delta_r_lda(3, 2, 4, 0.05)
        assert rep.sigma1_bar is None

    def test_needs_alpha0_or_reference(self):
        corpus = Corpus.from_documents([{0: 2}], V=2)
        with pytest.raises(ParameterError):
            lda_bound_report(corpus, 1.0, 0.1)

    def test_reference_fills_structure_bounds(self):
        corpus, _ = generate_lda_corpus(LdaParams(3, 60, 1.0, 1.0), 500, 50, RngState(0))
        rep = lda_bound_report(corpus, 1.0, 1.0, k_ref=3)
        assert rep.inputs["alpha0"] == 3.0
        assert rep.sigma1_bar is not None and rep.delta_prime is not None
        assert rep.spectrum.shape == (60,)
        assert np.all(np.diff(rep.spectrum) <= 0)

    def test_text_and_csv(self):
        corpus, _ = generate_lda_corpus(LdaParams(2, 20), 50, 10, RngState(1))
        rep = lda_bound_report(corpus, 1.0, 0.1, k_ref=2, conf=ConfidenceParams(0.1))
        lines = rep.to_text().splitlines()
        keys = [ln.split("=", 1)[0] for ln in lines]
        assert keys[: len(REPORT_FIELDS)] == list(REPORT_FIELDS)
        assert "delta=0.1" in lines
        header, row = rep.csv_header(), rep.to_csv_row()
        assert header.endswith("\n") and row.endswith("\n")
        assert len(header.split(",")) == len(row.split(",")) == len(lines)

    def test_vacuity_flags(self):
        corpus, _ = generate_lda_corpus(LdaParams(10, 10), 20, 5, RngState(2))
        rep = lda_bound_report(corpus, 1.0, 0.1, k_ref=10)
        assert rep.sigma1_vacuous and rep.sigmaK_vacuous
        assert "sigma1_bar=vacuous" in rep.to_text()

    def test_lower_not_above_upper(self):
        corpus, _ = generate_lda_corpus(LdaParams(4, 100, 1.0, 0.5), 2000, 100, RngState(3))
        rep = lda_bound_report(corpus, 1.0, 0.5, k_ref=4)
        assert rep.k_upper is None or rep.k_lower <= rep.k_upper


class TestGmmReport:
    def test_pipeline(self):
        params = GmmParams(3, 10, 0.5, 2.0)
        ds = generate_gmm_dataset(params, 20000, RngState(4))
        rep = gmm_bound_report(ds.points, 0.5, 2.0, 1.0, k_ref=3, w_min=float(ds.weights.min()))
        assert rep.model == "gmm"
        assert rep.inputs["N"] == 20000 and rep.inputs["m"] == 10
        assert rep.sigmaK_under is not None
        assert 0 <= rep.k_lower <= 10
