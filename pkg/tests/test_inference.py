"""Tests for design construction, OLS, bias correction, shares and intervals."""

import numpy as np
import pytest
from conftest import household, observation, synthetic

from thinprice.core.inference import (
    INTERCEPT,
    LOG_PRICE,
    LOG_PRICE_RATIO,
    LOG_STAR_PRICE,
    DesignMatrix,
    MeasurementErrorInfo,
    ModelKind,
    ModelSpec,
    PriceChoice,
    bias_correct,
    build_design,
    ci_ranks,
    empirical_ci,
    ols_fit,
    predicted_shares,
    single_column_correction,
)
from thinprice.core.sampling import assign_star_prices, draw_thin_sample
from thinprice.errors import (
    BiasCorrectionUnstableError,
    ConfigError,
    DataError,
    DatasetMismatchError,
    RankDeficiencyError,
    SingularSystemError,
)
from thinprice.precision import relative_error
from thinprice.survey.dataset import HouseholdRecord, Sector, SurveyDataset, household_share


def three_state_dataset(seed=0, n=60):
    """Two sectors, three states, varied prices; sector and state constant per FSU."""
    rng = np.random.default_rng(seed)
    households, observations = [], []
    for i in range(n):
        fsu = f"F{i // 3:03d}"
        sector = Sector.RURAL if (i // 3) % 2 == 0 else Sector.URBAN
        state = f"0{(i // 6) % 3 + 1}"
        size = int(rng.integers(1, 8))
        mpce = float(rng.uniform(500, 3000))
        households.append(household(fsu, f"H{i % 3}", sector, state, size, mpce))
        qty = float(rng.uniform(0.5, 5.0))
        value = qty * float(rng.uniform(5, 50))
        observations.append(observation(fsu, f"H{i % 3}", quantity=qty, value=value))
    return SurveyDataset(households, observations)


class TestBuildDesign:
    def test_actual_price_columns(self):
        design = build_design(three_state_dataset(), 101, ModelSpec(ModelKind.ACTUAL_PRICE))
        assert design.columns == (
            INTERCEPT,
            "sector[urban]",
            "state[02]",
            "state[03]",
            "hh_size",
            LOG_PRICE,
            "log_mpce",
        )
        assert design.n_columns == 7
        assert design.references == {"sector": "rural", "state": "01"}

    def test_decomposed_has_eight_columns(self):
        ds = three_state_dataset()
        star = assign_star_prices(ds, draw_thin_sample(ds, 101, 3))
        design = build_design(ds, 101, ModelSpec(ModelKind.STAR_PRICE_DECOMPOSED), star)
        assert design.n_columns == 8
        assert design.columns[-1] == LOG_PRICE_RATIO

    def test_reference_level_override(self):
        spec = ModelSpec(ModelKind.ACTUAL_PRICE, "urban", "02")
        design = build_design(three_state_dataset(), 101, spec)
        assert "sector[rural]" in design.columns
        assert "state[01]" in design.columns and "state[02]" not in design.columns

    def test_unknown_reference_level(self):
        spec = ModelSpec(ModelKind.ACTUAL_PRICE, state_reference="09")
        with pytest.raises(ConfigError):
            build_design(three_state_dataset(), 101, spec)

    def test_zero_ratio_column_dropped(self):
        ds, _, _ = synthetic(within_fsu_price_jitter=0.0)
        star = assign_star_prices(ds, draw_thin_sample(ds, 101, 3))
        design = build_design(ds, 101, ModelSpec(ModelKind.STAR_PRICE_DECOMPOSED), star)
        assert design.dropped == ((LOG_PRICE_RATIO, "zero-variance"),)
        full = build_design(ds, 101, ModelSpec(ModelKind.ACTUAL_PRICE))
        assert design.columns == full.columns
        np.testing.assert_array_equal(design.matrix, full.matrix)

    def test_star_kind_needs_star(self, small_synthetic):
        with pytest.raises(DatasetMismatchError):
            build_design(small_synthetic, 101, ModelSpec(ModelKind.STAR_PRICE))

    def test_misaligned_star(self, small_synthetic, toy_dataset):
        star = assign_star_prices(toy_dataset, draw_thin_sample(toy_dataset, 101, 1))
        with pytest.raises(DatasetMismatchError):
            build_design(small_synthetic, 101, ModelSpec(ModelKind.STAR_PRICE), star)

    def test_collinear_columns_named(self):
        # household size moves exactly with sector
        base = three_state_dataset()
        households = [
            HouseholdRecord(h.key, h.sector, h.state, 2 if h.sector is Sector.URBAN else 5, h.mpce)
            for h in base.households
        ]
        ds = SurveyDataset(households, base.observations)
        with pytest.raises(RankDeficiencyError) as info:
            build_design(ds, 101, ModelSpec(ModelKind.ACTUAL_PRICE))
        assert set(info.value.collinear) & {INTERCEPT, "sector[urban]", "hh_size"}

    def test_row_order_invariance(self):
        ds = three_state_dataset(seed=4)
        shuffled = SurveyDataset(list(reversed(ds.households)), list(reversed(ds.observations)))
        a = ols_fit(build_design(ds, 101, ModelSpec()))
        b = ols_fit(build_design(shuffled, 101, ModelSpec()))
        np.testing.assert_allclose(a.coefficients, b.coefficients, rtol=1e-10, atol=1e-12)


class TestOlsFit:
    def test_exact_single_regressor(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        fit = ols_fit(DesignMatrix.from_arrays(x, 2.0 * x))
        assert fit.coefficient("x0") == pytest.approx(2.0, rel=1e-14)
        np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-12)

    def test_identity_design(self):
        y = np.array([3.0, -1.0, 0.5])
        fit = ols_fit(DesignMatrix.from_arrays(np.eye(3), y))
        np.testing.assert_allclose(fit.coefficients, y, rtol=1e-14)
        assert fit.condition_number == pytest.approx(1.0)

    def test_matches_normal_equations(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n, k = int(rng.integers(20, 201)), int(rng.integers(1, 11))
            x = rng.normal(size=(n, k))
            y = x @ rng.normal(size=k) + rng.normal(size=n)
            fit = ols_fit(DesignMatrix.from_arrays(x, y))
            oracle = np.linalg.solve(x.T @ x, x.T @ y)
            np.testing.assert_allclose(fit.coefficients, oracle, rtol=1e-8, atol=1e-10)

    def test_residuals_orthogonal_to_design(self):
        ds, _, _ = synthetic(seed=2)
        design = build_design(ds, 101, ModelSpec())
        fit = ols_fit(design)
        x, r = design.matrix, fit.residuals
        bound = 1e-8 * np.linalg.norm(x) * np.linalg.norm(r)
        assert np.all(np.abs(x.T @ r) <= bound)

    def test_singular_system(self):
        x = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        with pytest.raises(SingularSystemError):
            ols_fit(DesignMatrix.from_arrays(x, [1.0, 2.0, 3.0]))

    def test_coefficient_lookup(self):
        fit = ols_fit(DesignMatrix.from_arrays(np.eye(2), [1.0, 2.0], ["a", "b"]))
        assert fit.named() == pytest.approx({"a": 1.0, "b": 2.0})
        assert fit.has("a") and not fit.has("c")
        with pytest.raises(KeyError):
            fit.coefficient("c")

    def test_from_arrays_validates(self):
        with pytest.raises(DataError):
            DesignMatrix.from_arrays(np.ones((3, 2)), np.ones(4))
        with pytest.raises(DataError):
            DesignMatrix.from_arrays(np.ones((3, 2)), np.ones(3), ["only"])


def error_in_variables(seed, n, beta_price=-2.0, noise_sd=0.1):
    """Regression where log price is observed with classical noise of known V."""
    rng = np.random.default_rng(seed)
    true_price = rng.normal(3.0, 0.3, size=n)
    mpce = rng.normal(7.5, 0.5, size=n)
    v = rng.normal(0.0, noise_sd, size=n)
    y = 1.0 + beta_price * true_price + 0.6 * mpce + rng.normal(0.0, 0.2, size=n)
    x = np.column_stack([np.ones(n), true_price + v, mpce])
    fit = ols_fit(DesignMatrix.from_arrays(x, y, [INTERCEPT, LOG_STAR_PRICE, "log_mpce"]))
    return fit, MeasurementErrorInfo.from_column(v)


class TestBiasCorrect:
    def test_zero_error_is_identity(self):
        fit, _ = error_in_variables(0, 500)
        me = MeasurementErrorInfo.from_column(np.zeros(500))
        assert bias_correct(fit, me) == fit.named()

    def test_forms_agree(self):
        fit, me = error_in_variables(1, 2000)
        corrected = bias_correct(fit, me)
        closed = single_column_correction(fit, me)
        k = fit.columns.index(LOG_STAR_PRICE)
        vtv = np.zeros_like(fit.gram_matrix)
        vtv[k, k] = me.vtv
        shrink = np.eye(3) - np.linalg.solve(fit.gram_matrix, vtv)
        via_inverse = np.linalg.solve(shrink, fit.coefficients)
        values = np.array(list(corrected.values()))
        assert relative_error(via_inverse, values) <= 1e-10
        assert relative_error(list(closed.values()), values) <= 1e-10

    def test_converges_to_naive_as_error_vanishes(self):
        fit, me = error_in_variables(2, 1000)
        naive = fit.coefficient(LOG_STAR_PRICE)
        gaps = []
        for scale in (1.0, 0.1, 0.01, 0.001):
            shrunk = MeasurementErrorInfo.from_column(me.v_column * scale)
            gaps.append(abs(bias_correct(fit, shrunk)[LOG_STAR_PRICE] - naive))
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 1e-4

    def test_column_must_exist(self):
        fit = ols_fit(DesignMatrix.from_arrays(np.eye(2), [1.0, 2.0]))
        with pytest.raises(DatasetMismatchError):
            bias_correct(fit, MeasurementErrorInfo.from_column([0.1, 0.2]))

    def test_unstable_when_error_swamps_signal(self):
        x = np.column_stack([np.ones(4), [1.0, 2.0, 3.0, 4.0]])
        y = [1.0, 3.0, 2.0, 5.0]
        fit = ols_fit(DesignMatrix.from_arrays(x, y, [INTERCEPT, LOG_STAR_PRICE]))
        # X'X = [[4, 10], [10, 30]]; removing 5 from the price entry makes it singular
        me = MeasurementErrorInfo(v_column=np.ones(4), vtv=5.0)
        with pytest.raises(BiasCorrectionUnstableError):
            bias_correct(fit, me)

    @pytest.mark.slow
    def test_attenuation_study(self):
        closer, estimates = 0, []
        for seed in range(100):
            fit, me = error_in_variables(seed, 50000)
            naive = fit.coefficient(LOG_STAR_PRICE)
            corrected = bias_correct(fit, me)[LOG_STAR_PRICE]
            closer += abs(corrected + 2.0) < abs(naive + 2.0)
            estimates.append(corrected)
        assert closer >= 95
        assert abs(np.mean(estimates) + 2.0) <= 0.05


class TestPredictedShares:
    def test_perfect_fit_reproduces_observed_shares(self):
        ds, _, _ = synthetic(noise_sd=0.0)
        fit = ols_fit(build_design(ds, 101, ModelSpec()))
        shares = predicted_shares(fit, ds, 101, PriceChoice.ACTUAL)
        observed = [household_share(ds, o.key, 101) for o in ds.observations_for(101)]
        np.testing.assert_allclose(shares, observed, rtol=1e-9)

    def test_star_equals_actual_when_prices_homogeneous(self):
        ds, _, _ = synthetic(within_fsu_price_jitter=0.0)
        star = assign_star_prices(ds, draw_thin_sample(ds, 101, 9))
        fit3 = ols_fit(build_design(ds, 101, ModelSpec(ModelKind.ACTUAL_PRICE)))
        fit4 = ols_fit(build_design(ds, 101, ModelSpec(ModelKind.STAR_PRICE_DECOMPOSED), star))
        np.testing.assert_allclose(fit4.coefficients, fit3.coefficients, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(
            predicted_shares(fit4, ds, 101, PriceChoice.STAR, star),
            predicted_shares(fit3, ds, 101, PriceChoice.ACTUAL),
            rtol=1e-10,
        )

    def test_doubling_mpce_halves_shares(self, small_synthetic):
        ds = small_synthetic
        fit = ols_fit(build_design(ds, 101, ModelSpec()))
        richer = [
            HouseholdRecord(h.key, h.sector, h.state, h.hh_size, 2.0 * h.mpce)
            for h in ds.households
        ]
        doubled = SurveyDataset(richer, ds.observations)
        np.testing.assert_allclose(
            predicted_shares(fit, doubled, 101), 0.5 * predicted_shares(fit, ds, 101), rtol=1e-12
        )

    def test_star_choice_needs_star(self, small_synthetic):
        fit = ols_fit(build_design(small_synthetic, 101, ModelSpec()))
        with pytest.raises(DatasetMismatchError):
            predicted_shares(fit, small_synthetic, 101, PriceChoice.STAR)

    def test_fit_from_other_item(self, small_synthetic, toy_dataset):
        fit = ols_fit(build_design(small_synthetic, 101, ModelSpec()))
        with pytest.raises(DatasetMismatchError):
            predicted_shares(fit, toy_dataset, 101)


class TestIntervals:
    def test_permutation_of_ranks(self):
        values = np.random.default_rng(0).permutation(np.arange(1, 1001))
        assert empirical_ci(values) == (25.0, 975.0)

    def test_constant(self):
        assert empirical_ci([3.5] * 1000) == (3.5, 3.5)

    def test_median_inside(self):
        values = np.random.default_rng(1).standard_cauchy(1000)
        lo, hi = empirical_ci(values)
        assert lo <= np.median(values) <= hi

    def test_too_few_values(self):
        with pytest.raises(DataError):
            empirical_ci(np.arange(900))

    @pytest.mark.parametrize("reps,expected", [(1000, (25, 975)), (200, (5, 195)), (1, (1, 1))])
    def test_ci_ranks(self, reps, expected):
        assert ci_ranks(reps) == expected

    def test_ci_ranks_invalid(self):
        with pytest.raises(ConfigError):
            ci_ranks(0)
