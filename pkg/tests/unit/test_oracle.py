"""
Unit tests for the brute-force oracles

Tests the linear-Gaussian MMSE and error probability, the quantum phase
Bayes MSE quadrature, report construction and the default suite.
"""

import math

import numpy as np
import pytest

from src.errors import DomainError
from src.oracle import (
    LinearGaussianInstance,
    OracleReport,
    PriorOnlyInstance,
    QuantumPhaseInstance,
    default_suite,
    gaussian_pe,
    linear_gaussian_mmse,
    phase_mse_on_grid,
    quantum_phase_bayes_mse,
    quantum_phase_instances,
    random_linear_gaussian_instances,
    random_probe_amplitudes,
    verify,
)
from src.prior import Direction, GaussianPrior


@pytest.mark.unit
class TestLinearGaussian:
    """TEST-OR-001: Tests for the closed-form classical oracle."""

    def test_scalar_mmse(self):
        prior = GaussianPrior(mean=[0.0], sigma0=[[1.0]])
        assert linear_gaussian_mmse(prior, [[1.0]], [[1.0]], [1.0]) == pytest.approx(0.5, rel=1e-14)

    def test_uninformative_measurement_returns_prior_variance(self, prior_2d):
        u = np.array([1.0, 2.0])
        value = linear_gaussian_mmse(prior_2d, np.eye(2), 1e12 * np.eye(2), u)
        assert value == pytest.approx(float(u @ prior_2d.covariance @ u), abs=1e-6)

    def test_singular_noise_raises(self, prior_2d):
        with pytest.raises(DomainError):
            linear_gaussian_mmse(prior_2d, np.eye(2), np.zeros((2, 2)), [1.0, 0.0])

    def test_shape_mismatch_raises(self, prior_2d):
        with pytest.raises(DomainError):
            linear_gaussian_mmse(prior_2d, np.ones((1, 3)), np.eye(1), [1.0, 0.0])

    def test_gaussian_pe(self):
        assert gaussian_pe(0.0) == 0.5
        assert gaussian_pe(float("inf")) == 0.0
        assert gaussian_pe(2.0) == pytest.approx(0.5 * math.erfc(1.0 / math.sqrt(2.0)), rel=1e-14)

    def test_classical_dominance(self):
        """Every random linear-Gaussian MMSE dominates its BZZB."""
        reports = verify(random_linear_gaussian_instances(20))
        assert len(reports) == 20
        for report in reports:
            assert report.margin >= -1e-9, report.instance_id
            assert report.passed

    def test_low_noise_bound_stays_close_to_mmse(self):
        """With R -> 0 the pe model vanishes except near tau = 0; the bound tracks the MMSE."""
        instance = LinearGaussianInstance("low-noise", GaussianPrior(mean=[0.0], sigma0=[[1.0]]),
                                          np.eye(1), 1e-10 * np.eye(1), Direction(u=[1.0]))
        mmse = instance.achieved_mse()
        bound = instance.bound()
        assert mmse == pytest.approx(1e-10, rel=1e-6)
        assert 0.0 < bound <= mmse * (1.0 + 1e-9)
        assert bound == pytest.approx(mmse, rel=1e-3)

    def test_generation_is_deterministic(self):
        a = random_linear_gaussian_instances(3, seed=7)
        b = random_linear_gaussian_instances(3, seed=7)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.h_matrix, y.h_matrix)
            assert x.prior == y.prior


@pytest.mark.unit
class TestQuantumPhaseOracle:
    """TEST-OR-002: Tests for the quantum phase Bayes MSE."""

    def test_vacuum_probe_returns_prior_variance(self):
        assert quantum_phase_bayes_mse([1.0], 0.1) == pytest.approx(0.01, rel=1e-9)

    def test_information_reduces_mse(self):
        c = np.array([1.0, 1.0]) / math.sqrt(2.0)
        assert quantum_phase_bayes_mse(c, 0.2) < 0.04

    def test_wider_superposition_lowers_mse(self):
        """Uniform superpositions over more number states estimate the phase better."""
        values = [quantum_phase_bayes_mse(np.ones(d) / math.sqrt(d), 0.2) for d in (1, 2, 4, 8)]
        assert values[0] == pytest.approx(0.04, rel=1e-6)
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_wider_prior_raises_mse(self):
        c = np.ones(2) / math.sqrt(2.0)
        assert quantum_phase_bayes_mse(c, 0.4) > quantum_phase_bayes_mse(c, 0.1)

    def test_unnormalized_amplitudes_raise(self):
        with pytest.raises(DomainError):
            quantum_phase_bayes_mse([1.0, 1.0], 0.1)

    def test_prior_too_wide_raises(self):
        with pytest.raises(DomainError):
            quantum_phase_bayes_mse([1.0], 0.6)

    def test_probe_dimension_limit(self):
        with pytest.raises(DomainError):
            phase_mse_on_grid(np.ones(9) / 3.0, 0.1, 16, 64)

    @pytest.mark.slow
    def test_quantum_dominance(self):
        for instance in quantum_phase_instances():
            report = OracleReport.build(instance.instance_id, instance.achieved_mse(), instance.bound())
            assert report.passed, report

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_random_pure_state_dominance(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        sigma = (0.05, 0.1, 0.2)[seed % 3]
        instance = QuantumPhaseInstance(f"random-{seed}", random_probe_amplitudes(rng, d), sigma)
        report = OracleReport.build(instance.instance_id, instance.achieved_mse(), instance.bound())
        assert report.passed, report


@pytest.mark.unit
class TestReports:
    """TEST-OR-003: Tests for report construction and the default suite."""

    def test_build_pass_and_fail(self):
        assert OracleReport.build("a", 1.0, 0.5).passed
        assert not OracleReport.build("b", 0.5, 1.0).passed
        assert OracleReport.build("c", 1.0, 1.0 + 1e-12).passed

    def test_to_dict_uses_pass_key(self):
        record = OracleReport.build("a", 1.0, 0.5).to_dict()
        assert record == {"instance_id": "a", "achieved_mse": 1.0, "bound": 0.5,
                          "margin": 0.5, "pass": True}

    def test_prior_only_saturates(self, prior_2d):
        instance = PriorOnlyInstance(instance_id="p", prior=prior_2d, u=Direction(u=[1.0, 0.0]))
        report = verify([instance])[0]
        assert report.achieved_mse == pytest.approx(2.0)
        assert report.bound == pytest.approx(2.0, rel=1e-9)
        assert report.passed

    def test_suite_composition(self):
        classical = default_suite("classical")
        quantum = default_suite("quantum")
        assert len(classical) == 21
        assert len(quantum) == 9
        assert all(isinstance(i, QuantumPhaseInstance) for i in quantum)
        assert sum(isinstance(i, LinearGaussianInstance) for i in classical) == 20
        assert [i.instance_id for i in default_suite()] == \
            [i.instance_id for i in classical + quantum]

    def test_unknown_suite(self):
        with pytest.raises(DomainError):
            default_suite("everything")
