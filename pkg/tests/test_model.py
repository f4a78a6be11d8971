import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from cryptoselect.distributions import (
    constant_beta,
    triangular,
    triangular2x,
    triangular_support,
    uniform01,
)
from cryptoselect.model import (
    AssetClass,
    CryptoAsset,
    InitPolicy,
    InvestorProfile,
    bernoulli_adoption_pmf,
    classify_asset,
    sample_assets,
    sample_investors,
)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def test_class_quadrants():
    assert classify_asset(0.7, 0.8) is AssetClass.CBDC
    assert classify_asset(0.2, 0.9) is AssetClass.STABLECOIN
    assert classify_asset(0.9, 0.2) is AssetClass.CRYPTOCURRENCY
    assert classify_asset(0.1, 0.1) is AssetClass.CRYPTO_TOKEN


def test_boundary_goes_to_high_side():
    assert classify_asset(0.5, 0.5) is AssetClass.CBDC
    assert classify_asset(0.5, 0.0) is AssetClass.CRYPTOCURRENCY
    assert classify_asset(0.0, 0.5) is AssetClass.STABLECOIN
    assert classify_asset(0.49999999, 0.5) is AssetClass.STABLECOIN


@given(unit, unit)
def test_classification_is_a_partition(s, xi):
    klass = classify_asset(s, xi)
    assert klass in AssetClass
    # membership must be consistent with the defining half-planes
    assert (s >= 0.5) == (klass in (AssetClass.CBDC, AssetClass.CRYPTOCURRENCY))
    assert (xi >= 0.5) == (klass in (AssetClass.CBDC, AssetClass.STABLECOIN))


@pytest.mark.parametrize("s,xi", [(-0.1, 0.5), (0.5, 1.2), (math.nan, 0.5), (0.5, math.inf)])
def test_classify_rejects_out_of_range(s, xi):
    with pytest.raises(ValueError):
        classify_asset(s, xi)


def test_class_csv_labels():
    assert [k.value for k in AssetClass] == [
        "cbdc", "stablecoin", "cryptocurrency", "crypto_token"]


@given(unit)
def test_adoption_pmf_is_bernoulli(a):
    assert bernoulli_adoption_pmf(1, a) == a
    assert bernoulli_adoption_pmf(0, a) == 1.0 - a


def test_adoption_pmf_rejects_bad_args():
    with pytest.raises(ValueError):
        bernoulli_adoption_pmf(2, 0.5)
    with pytest.raises(ValueError):
        bernoulli_adoption_pmf(1, 1.5)


def test_asset_validates_adoption_range():
    with pytest.raises(ValueError):
        CryptoAsset(0, 0.5, 0.5, 1.2, 0.0, AssetClass.CBDC)
    with pytest.raises(ValueError):
        CryptoAsset(0, 0.5, 0.5, -0.1, 0.0, AssetClass.CBDC)


def test_investor_profile_requires_finite_betas():
    InvestorProfile(-3.0, 0.0, 5.0)  # negatives are legal (risk prone)
    with pytest.raises(ValueError):
        InvestorProfile(math.nan, 1.0, 1.0)
    with pytest.raises(ValueError):
        InvestorProfile(1.0, math.inf, 1.0)


def test_sample_assets_rejects_tiny_market():
    with pytest.raises(ValueError):
        sample_assets(1, uniform01(), uniform01(), InitPolicy(),
                      np.random.default_rng(0))


def test_sample_assets_fields_in_range():
    rng = np.random.default_rng(7)
    assets = sample_assets(500, uniform01(), uniform01(), InitPolicy(), rng)
    assert len(assets) == 500
    assert [x.asset_id for x in assets] == list(range(500))
    for x in assets:
        assert 0.0 <= x.s <= 1.0 and 0.0 <= x.xi <= 1.0
        assert 0.0 <= x.a <= 1.0
        assert -1.0 <= x.r <= 1.0
        assert x.klass is classify_asset(x.s, x.xi)


def test_uniform_features_fill_classes_evenly():
    rng = np.random.default_rng(11)
    assets = sample_assets(10_000, uniform01(), uniform01(), InitPolicy(), rng)
    counts = [sum(1 for x in assets if x.klass is k) for k in AssetClass]
    # each quadrant has probability 1/4; chi-square at the 1% level
    _, p = stats.chisquare(counts)
    assert p > 0.01, counts


def test_triangular_features_overweight_cbdc():
    rng = np.random.default_rng(13)
    n = 20_000
    assets = sample_assets(n, triangular2x(), triangular2x(), InitPolicy(), rng)
    frac = sum(1 for x in assets if x.klass is AssetClass.CBDC) / n
    # P(s >= 1/2) = 3/4 per axis under pdf 2x, so 9/16 jointly
    p = 9 / 16
    assert abs(frac - p) < 4 * math.sqrt(p * (1 - p) / n)


def test_constant_init_policy():
    rng = np.random.default_rng(3)
    init = InitPolicy(adoption="constant", adoption_value=0.25,
                      returns="constant", return_value=-0.5)
    assets = sample_assets(10, uniform01(), uniform01(), init, rng)
    assert all(x.a == 0.25 and x.r == -0.5 for x in assets)


def test_init_policy_round_trips():
    init = InitPolicy(adoption="constant", adoption_value=0.3,
                      returns="uniform", return_lo=-2.0, return_hi=2.0)
    assert InitPolicy.from_dict(init.to_dict()) == init


def test_sample_investors_constant_spec():
    rng = np.random.default_rng(5)
    invs = sample_investors(4, constant_beta(1.0), constant_beta(2.0),
                            constant_beta(-1.0), rng)
    assert all(p == InvestorProfile(1.0, 2.0, -1.0) for p in invs)


def test_sample_investors_requires_positive_count():
    rng = np.random.default_rng(5)
    with pytest.raises(ValueError):
        sample_investors(0, constant_beta(1.0), constant_beta(1.0),
                         constant_beta(1.0), rng)


def test_triangular_support_population_statistics():
    # pdf (x + 4)/32 on [-4, 4]: mean = -4 + (2/3)*8 = 4/3, var = 8^2/18
    spec = triangular_support(-4.0, 4.0)
    assert spec.mean() == pytest.approx(4 / 3)
    rng = np.random.default_rng(17)
    draws = spec.sample(rng, 100_000)
    assert draws.min() >= -4.0 and draws.max() <= 4.0
    assert abs(draws.mean() - 4 / 3) < 0.05
    assert np.var(draws) == pytest.approx(64 / 18, rel=0.05)


def test_feature_distribution_shapes():
    tri = triangular2x()
    assert tri.pdf(0.5) == pytest.approx(1.0)   # 2x at x = 1/2
    assert tri.cdf(0.5) == pytest.approx(0.25)  # x^2
    uni = uniform01()
    assert uni.pdf(0.3) == 1.0
    assert uni.cdf(0.3) == pytest.approx(0.3)
    gen = triangular(0.0, 0.25, 1.0)
    rng = np.random.default_rng(23)
    draws = gen.sample(rng, 50_000)
    # mode of a triangular pdf is its densest point
    hist, edges = np.histogram(draws, bins=20, range=(0, 1))
    assert 0.15 < edges[int(np.argmax(hist))] < 0.35


@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=2**63 - 1))
def test_asset_sampling_is_seed_deterministic(seed):
    a = sample_assets(20, uniform01(), uniform01(), InitPolicy(),
                      np.random.default_rng(seed))
    b = sample_assets(20, uniform01(), uniform01(), InitPolicy(),
                      np.random.default_rng(seed))
    assert a == b
