"""Effective secrecy rate: closed forms, monotonicity, accumulator parity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lightcell import (
    EsrAccumulator,
    QoSProfile,
    eb_from_bps,
    esr_expectation,
    esr_running,
    theta_from_bps,
)

LN2 = math.log(2.0)


class TestUnitConversion:
    def test_theta_scaling(self):
        # 1e-8 per bit/s against 20 MHz: 1e-8 * 2e7 / ln2
        assert theta_from_bps(1e-8, 2e7) == pytest.approx(0.2 / LN2, rel=1e-14)

    def test_eb_scaling(self):
        assert eb_from_bps(1e6, 2e7) == pytest.approx(0.05 * LN2, rel=1e-14)

    def test_products_invariant(self):
        # theta * R and theta * B_e must not depend on the unit system
        bw = 2e7
        theta_bps, eb_bps = 3.7e-9, 4.2e5
        r_bps = 1.9e7
        r_nats = r_bps * LN2 / bw
        assert theta_from_bps(theta_bps, bw) * r_nats == pytest.approx(
            theta_bps * r_bps, rel=1e-12
        )
        assert theta_from_bps(theta_bps, bw) * eb_from_bps(eb_bps, bw) == pytest.approx(
            theta_bps * eb_bps, rel=1e-12
        )

    def test_qos_profile_validation(self):
        with pytest.raises(ValueError, match="theta"):
            QoSProfile(theta=0.0, eb=1.0)
        with pytest.raises(ValueError, match="theta"):
            QoSProfile(theta=-1.0, eb=1.0)
        with pytest.raises(ValueError):
            QoSProfile(theta=1.0, eb=-0.5)
        p = QoSProfile.from_bps(1e-8, 1e6, 2e7)
        assert p.theta == pytest.approx(0.2 / LN2)
        assert p.eb == pytest.approx(0.05 * LN2)


class TestEsrExpectation:
    def test_constant_samples_give_the_rate(self):
        for theta in (1e-6, 0.3, 5.0):
            assert esr_expectation([1.7] * 50, theta) == pytest.approx(1.7, rel=1e-12)

    def test_two_point_closed_form(self):
        theta, r = 0.8, 2.5
        samples = [0.0, r] * 500
        expect = -(1.0 / theta) * math.log((1.0 + math.exp(-theta * r)) / 2.0)
        assert esr_expectation(samples, theta) == pytest.approx(expect, rel=1e-12)

    def test_small_theta_approaches_mean(self):
        rng = np.random.default_rng(3)
        samples = rng.exponential(1.5, size=10_000)
        mean = samples.mean()
        assert esr_expectation(samples, 1e-12) == pytest.approx(mean, rel=1e-3)

    def test_non_increasing_in_theta(self):
        rng = np.random.default_rng(4)
        samples = np.concatenate([np.zeros(30), rng.uniform(0.5, 3.0, 70)])
        thetas = np.logspace(-6, 2, 25)
        values = [esr_expectation(samples, t) for t in thetas]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))

    def test_large_theta_rate_product_is_stable(self):
        # exp(-theta*R) underflows near theta*R ~ 1000; the shifted form must not
        samples = np.array([800.0, 900.0, 1000.0])
        got = esr_expectation(samples, 2.0)
        assert 799.0 < got < 801.0  # dominated by the smallest sample

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        samples = rng.uniform(0, 3, 200)
        shuffled = rng.permutation(samples)
        assert esr_expectation(samples, 0.7) == pytest.approx(
            esr_expectation(shuffled, 0.7), rel=1e-14
        )

    def test_errors(self):
        with pytest.raises(ValueError):
            esr_expectation([], 1.0)
        with pytest.raises(ValueError):
            esr_expectation([1.0], 0.0)

    @given(
        st.lists(st.floats(min_value=0.0, max_value=50.0), min_size=1, max_size=60),
        st.floats(min_value=1e-3, max_value=10.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_never_exceeds_sample_mean(self, samples, theta):
        esr = esr_expectation(samples, theta)
        assert esr <= np.mean(samples) + 1e-9
        if len(set(samples)) > 1 and np.std(samples) > 1e-3:
            assert esr < np.mean(samples)


class TestRunning:
    def test_first_slot_equals_first_rate(self):
        assert esr_running([2.3, 99.0, 7.0], theta=0.5, t=1) == pytest.approx(2.3, rel=1e-12)

    def test_running_matches_batch_prefix(self):
        rng = np.random.default_rng(6)
        history = rng.uniform(0, 2.5, 300)
        for t in (1, 17, 300):
            assert esr_running(history, 0.4, t=t) == pytest.approx(
                esr_expectation(history[:t], 0.4), rel=1e-14
            )

    def test_iid_convergence_to_expectation(self):
        rng = np.random.default_rng(7)
        theta = 0.6
        dist = lambda n: rng.choice([0.0, 1.0, 2.4], size=n, p=[0.3, 0.3, 0.4])
        history = dist(10_000)
        # analytic expectation of the three-point mixture
        analytic = -(1.0 / theta) * math.log(
            0.3 + 0.3 * math.exp(-theta) + 0.4 * math.exp(-theta * 2.4)
        )
        assert esr_running(history, theta) == pytest.approx(analytic, rel=0.02)


class TestAccumulator:
    def test_incremental_equals_batch_to_1e12(self):
        rng = np.random.default_rng(8)
        history = np.concatenate([np.zeros(500), rng.uniform(0, 3, 9_500)])
        rng.shuffle(history)
        for theta in (1e-4, 0.3, 8.0):
            acc = EsrAccumulator(theta)
            for r in history:
                acc.add(float(r))
            batch = esr_expectation(history, theta)
            assert acc.count == history.size
            assert acc.value() == pytest.approx(batch, rel=1e-12, abs=1e-12)

    def test_zero_rates_give_zero_not_negative_zero(self):
        acc = EsrAccumulator(0.5)
        acc.add(0.0)
        acc.add(0.0)
        assert acc.value() == 0.0
        assert math.copysign(1.0, acc.value()) == 1.0
