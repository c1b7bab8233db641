import math

import numpy as np
import pytest

from brownlab.ensembles import Seed, sample_ginibre
from brownlab.entropy import (
    InconsistencyWarning,
    ball_log_volume,
    ball_log_volume_limit,
    default_dt_norm_bound,
    diagonal_entropy,
    dt_equality_report,
    entropy_upper_bound,
    offdiagonality,
    selfadjoint_entropy,
    variance_bound,
)
from brownlab.matcore import eigenvalues, offdiag_second_moment, trace_word
from brownlab.measures import (
    empirical,
    log_energy,
    point_mass,
    second_moment_radial,
    semicircle,
    uniform_circle,
    uniform_disk,
)

import oracles

LN_PI = math.log(math.pi)


class TestOffdiagonality:
    def test_circular_element(self):
        assert offdiagonality(1.0, uniform_disk(0, 1)) == pytest.approx(0.5)

    def test_normal_model_is_zero(self):
        mu = uniform_circle(0.3, 1.2)
        assert offdiagonality(second_moment_radial(mu), mu) == pytest.approx(0.0, abs=1e-12)

    def test_dt_inputs_return_o(self):
        mu, o = uniform_disk(0.2 - 0.1j, 1.4), 0.8
        assert offdiagonality(second_moment_radial(mu) + o, mu) == pytest.approx(o)

    def test_negative_result_warns_but_returns_raw(self):
        with pytest.warns(InconsistencyWarning):
            val = offdiagonality(0.1, uniform_circle(0, 1))
        assert val == pytest.approx(-0.9)

    def test_rejects_negative_input(self):
        with pytest.raises(ValueError):
            offdiagonality(-0.1, uniform_disk(0, 1))


class TestDiagonalEntropy:
    def test_unit_circle(self):
        assert diagonal_entropy(uniform_circle(0, 1)) == pytest.approx(0.75 + LN_PI / 2)

    def test_point_mass(self):
        assert diagonal_entropy(point_mass(1)) == float("-inf")

    def test_unit_disk(self):
        assert diagonal_entropy(uniform_disk(0, 1)) == pytest.approx(0.5 + LN_PI / 2)


class TestEntropyUpperBound:
    def test_circular_value(self):
        assert entropy_upper_bound(uniform_disk(0, 1), 0.5) == pytest.approx(1 + LN_PI)

    def test_zero_offdiagonality(self):
        assert entropy_upper_bound(uniform_disk(0, 1), 0.0) == float("-inf")
        assert entropy_upper_bound(point_mass(0), 0.5) == float("-inf")

    def test_circle_with_special_offdiagonality(self):
        # log term cancels when od = 1/(2 pi^2)
        assert entropy_upper_bound(uniform_circle(0, 1), 1 / (2 * math.pi**2)) == pytest.approx(
            1.25
        )

    def test_strictly_increasing_in_offdiagonality(self):
        mu = uniform_disk(0, 1)
        vals = [entropy_upper_bound(mu, o) for o in (0.1, 0.2, 0.5, 1.0)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_difference_to_diagonal_entropy_identity(self):
        rng = np.random.default_rng(51)
        for _ in range(25):
            r = float(rng.uniform(0.3, 2.0))
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            mu = uniform_disk(c, r) if rng.uniform() < 0.5 else uniform_circle(c, r)
            od = float(rng.uniform(1e-3, 2.0))
            gap = entropy_upper_bound(mu, od) - diagonal_entropy(mu)
            assert gap == pytest.approx(0.5 + math.log(math.sqrt(2 * od)) + LN_PI / 2, abs=1e-10)

    def test_rejects_negative_offdiagonality(self):
        with pytest.raises(ValueError):
            entropy_upper_bound(uniform_disk(0, 1), -0.1)


class TestSelfadjointEntropy:
    def test_unit_variance_semicircle(self):
        assert selfadjoint_entropy(semicircle(0, 2)) == pytest.approx(
            0.5 + math.log(2 * math.pi) / 2, abs=1e-4
        )

    def test_point_mass(self):
        assert selfadjoint_entropy(point_mass(0.0)) == float("-inf")

    def test_scaling_law(self):
        a = 1.5
        base = selfadjoint_entropy(semicircle(0, 2))
        assert selfadjoint_entropy(semicircle(0, 2 * a)) == pytest.approx(
            base + math.log(a), abs=1e-3
        )

    def test_rejects_planar_support(self):
        with pytest.raises(ValueError):
            selfadjoint_entropy(uniform_disk(0, 1))


class TestVarianceBound:
    def test_printed_form_at_unit_variance(self):
        assert variance_bound(1.0, 0j, exponent=2) == pytest.approx(math.log(math.pi * math.e))

    def test_default_exponent_matches_circular_upper_bound(self):
        assert variance_bound(1.0, 0j, exponent=1) == pytest.approx(1 + LN_PI)
        assert variance_bound(1.0, 0j, exponent=1) == pytest.approx(
            entropy_upper_bound(uniform_disk(0, 1), 0.5), abs=1e-10
        )

    def test_zero_variance(self):
        c = 0.7 - 0.3j
        assert variance_bound(abs(c) ** 2, c) == float("-inf")

    def test_rejects_negative_variance_and_bad_exponent(self):
        with pytest.raises(ValueError):
            variance_bound(0.1, 1.0)
        with pytest.raises(ValueError):
            variance_bound(1.0, 0j, exponent=3)


class TestBallLogVolume:
    def test_limit_special_value(self):
        assert ball_log_volume_limit(1 / (2 * math.pi)) == pytest.approx(0.5)

    def test_small_case_direct_arithmetic(self):
        # N=2, o=1: the ball is a 2-disk of radius sqrt(2), volume 2 pi
        assert ball_log_volume(2, 1.0) == pytest.approx(0.25 * math.log(2 * math.pi) + math.log(2) / 2)

    def test_converges_to_limit(self):
        limit = ball_log_volume_limit(1.0)
        gaps = [abs(ball_log_volume(n, 1.0) - limit) for n in (50, 100, 200)]
        assert gaps[-1] <= 0.02
        assert gaps[0] > gaps[1] > gaps[2]

    def test_against_stirling_oracle(self):
        for n in (50, 100, 200):
            assert ball_log_volume(n, 1.0) == pytest.approx(
                oracles.stirling_ball_log_volume(n, 1.0), abs=1e-6
            )

    def test_validation(self):
        with pytest.raises(ValueError):
            ball_log_volume(1, 1.0)
        with pytest.raises(ValueError):
            ball_log_volume(5, 0.0)
        with pytest.raises(ValueError):
            ball_log_volume_limit(0.0)


class TestConsistencyWithMatrices:
    def test_offdiagonality_of_empirical_spectrum_matches_matrix(self):
        for k in range(5):
            m = sample_ginibre(60, Seed(52).derive(k))
            lam = eigenvalues(m)
            second = trace_word(m, "1*").real
            od = offdiagonality(second, empirical(lam))
            assert od == pytest.approx(offdiag_second_moment(m), abs=1e-8)


class TestDTEqualityReport:
    def test_circular_case_closed_forms(self):
        report = dt_equality_report(
            uniform_disk(0, 1),
            0.5,
            [40, 80],
            2,
            0.2,
            trials=10,
            seed=Seed(53),
            target_dim=80,
            target_trials=20,
        )
        assert report.summary["upper_bound"] == pytest.approx(1 + LN_PI)
        assert report.summary["equality_gap"] == pytest.approx(0.0, abs=1e-12)
        assert len(report.rows) == 2
        assert {r["dim"] for r in report.rows} == {40, 80}

    def test_hit_rates_nondecreasing_for_triangular_family(self):
        report = dt_equality_report(
            point_mass(0),
            1.0,
            [100, 200, 400],
            2,
            0.1,
            trials=30,
            seed=Seed(54),
            target_dim=400,
            target_trials=40,
        )
        rates = [r["hit_rate"] for r in report.rows]
        assert rates == sorted(rates)
        assert rates[-1] >= 0.9
        # atomic measure: the entropy fields collapse to -inf
        assert report.summary["upper_bound"] == float("-inf")
        assert report.summary["equality_gap"] is None

    def test_small_delta_diagnostic_close_to_limit(self):
        report = dt_equality_report(
            uniform_disk(0, 1),
            0.5,
            [400],
            1,
            0.3,
            trials=2,
            seed=Seed(55),
            delta=0.001,
            target_dim=100,
            target_trials=10,
        )
        diag = report.summary["diagonal_entropy"]
        limit = diag + ball_log_volume_limit(0.5)
        assert report.rows[0]["lower_diagnostic"] == pytest.approx(limit, abs=0.1)

    def test_default_norm_bound(self):
        assert default_dt_norm_bound(point_mass(0), 1.0) == pytest.approx(4.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            dt_equality_report(uniform_disk(0, 1), 0.0, [10], 1, 0.1, 1, Seed(0))
        with pytest.raises(ValueError):
            dt_equality_report(uniform_disk(0, 1), 0.5, [], 1, 0.1, 1, Seed(0))
        with pytest.raises(ValueError):
            dt_equality_report(uniform_disk(0, 1), 0.5, [10], 1, 0.1, 1, Seed(0), delta=1.5)
