import numpy as np
import pytest

from changepoint.prior import SegmentLengthPrior
from kinematics.error_types import ValidationError


def test_pmf_normalizes_over_support():
    prior = SegmentLengthPrior(p=0.05, min_len=5, max_len=200)
    lengths = np.arange(0, 260)
    assert np.sum(prior.pmf(lengths)) == pytest.approx(1.0, abs=1e-12)
    assert prior.pmf(4) == 0.0
    assert prior.pmf(201) == 0.0


def test_survival_matches_cumulative_sum():
    prior = SegmentLengthPrior(p=0.05, min_len=5, max_len=200)
    for length in (5, 6, 30, 150, 199):
        expected = 1.0 - np.sum(prior.pmf(np.arange(prior.min_len, length + 1)))
        assert np.exp(prior.log_survival(length)) == pytest.approx(expected, abs=1e-12)
        assert prior.cdf(length) == pytest.approx(1.0 - expected, abs=1e-12)


def test_survival_boundaries():
    prior = SegmentLengthPrior(p=0.01, min_len=10, max_len=50)
    assert prior.log_survival(3) == 0.0
    assert prior.log_survival(9) == 0.0
    assert prior.log_survival(50) == -np.inf
    assert prior.log_survival(80) == -np.inf


def test_log_beta_is_geometric():
    prior = SegmentLengthPrior(p=0.1, min_len=10, max_len=10000)
    assert prior.log_beta(11) - prior.log_beta(10) == pytest.approx(np.log(0.9))


@pytest.mark.parametrize('kwargs', [{'p': 0.0}, {'p': 1.0}, {'min_len': 1}, {'min_len': 20, 'max_len': 10}])
def test_invalid_prior(kwargs):
    with pytest.raises(ValidationError):
        SegmentLengthPrior(**kwargs).validate()
