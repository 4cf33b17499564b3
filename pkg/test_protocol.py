#!/usr/bin/env python3
"""
Tests for analytic readout distributions, position mapping and N_min
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from core import protocol
from core.cvmode import INV_SQRT_2PI, gaussian_characteristic
from core.errors import InvalidInputError
from core.protocol import LambDickeStatus, ReadoutDistribution


class TestReadoutDistribution:
    """Closed form and characteristic-function route"""

    def test_single_ion_example(self):
        dist = protocol.readout_distribution_gaussian(2 * math.log(2), 1)
        assert dist.probs == pytest.approx([0.75, 0.25], abs=1e-12)
        general = protocol.readout_distribution(gaussian_characteristic(2 * math.log(2)), 1)
        assert general.probs == pytest.approx([0.75, 0.25], abs=1e-12)

    @pytest.mark.parametrize("variance, n_qubits", [(0.3, 6), (0.01, 9), (5.0, 3)])
    def test_routes_agree(self, variance, n_qubits):
        closed = protocol.readout_distribution_gaussian(variance, n_qubits)
        general = protocol.readout_distribution(gaussian_characteristic(variance), n_qubits)
        assert np.max(np.abs(closed.probs - general.probs)) < 1e-12

    @pytest.mark.parametrize("variance", [1e-3, 0.1, 1.0, 30.0])
    def test_probabilities_valid(self, variance):
        dist = protocol.readout_distribution_gaussian(variance, 7)
        assert dist.size == 128
        assert dist.n_qubits == 7
        assert np.all(dist.probs >= 0)
        assert dist.probs.sum() == pytest.approx(1.0, abs=1e-10)

    def test_general_route_accepts_scalar_chi(self):
        def chi(k):
            return math.exp(-0.25 * k * k) * INV_SQRT_2PI

        dist = protocol.readout_distribution(chi, 4)
        closed = protocol.readout_distribution_gaussian(0.5, 4)
        assert np.max(np.abs(dist.probs - closed.probs)) < 1e-12

    @pytest.mark.parametrize("n_qubits", [4, 10])
    def test_delta_limit_concentrates_on_zero(self, n_qubits):
        variance = 1e-12
        dist = protocol.readout_distribution_gaussian(variance, n_qubits)
        # leakage out of l = 0 grows as (K+1)^2 variance / 12
        allowance = max(1e-9, (2 ** n_qubits) ** 2 * variance / 10)
        assert dist.probs[0] >= 1 - allowance

    def test_flat_limit_is_uniform(self):
        dist = protocol.readout_distribution_gaussian(100.0, 6)
        assert np.allclose(dist.probs, 1 / 64, atol=1e-9)

    def test_zero_coupling_reads_zero(self):
        dist = protocol.readout_distribution(gaussian_characteristic(1.0), 4, r=0.0)
        assert dist.probs[0] == pytest.approx(1.0, abs=1e-12)

    def test_chi_normalization_checked(self):
        with pytest.raises(InvalidInputError):
            protocol.readout_distribution(lambda k: 2 * gaussian_characteristic(1.0)(k), 3)

    def test_chi_symmetry_checked(self):
        def chi(k):
            k = np.asarray(k, dtype=float)
            return (1 + 0.1j * k ** 2) * np.exp(-0.5 * k ** 2) * INV_SQRT_2PI

        with pytest.raises(InvalidInputError):
            protocol.readout_distribution(chi, 3)

    def test_container_validation(self):
        with pytest.raises(InvalidInputError):
            ReadoutDistribution(np.full(3, 1 / 3))
        with pytest.raises(InvalidInputError):
            ReadoutDistribution(np.array([0.6, 0.6]))
        with pytest.raises(InvalidInputError):
            ReadoutDistribution(np.array([1.1, -0.1]))
        ripple = ReadoutDistribution(np.array([1.1, -0.1]), truncation_order=1)
        assert ripple.probs[1] == pytest.approx(-0.1)

    def test_invalid_variance(self):
        with pytest.raises(InvalidInputError):
            protocol.readout_distribution_gaussian(0.0, 3)
        with pytest.raises(InvalidInputError):
            protocol.readout_distribution_gaussian(1.0, 0)


class TestTruncation:
    """Series truncation at tolerance epsilon"""

    @pytest.mark.parametrize("variance, epsilon, expected", [
        (8.0, 0.1, 1),
        (2.0, 0.1, 2),
        (2.0, 0.01, 3),
        (0.1, 0.01, 10),
    ])
    def test_order(self, variance, epsilon, expected):
        assert protocol.truncation_order(variance, epsilon) == expected

    @pytest.mark.parametrize("variance", [0.05, 0.3, 1.7])
    def test_order_is_smallest(self, variance):
        epsilon = 0.01
        order = protocol.truncation_order(variance, epsilon)
        assert math.exp(-order ** 2 * variance / 2) <= epsilon
        if order > 1:
            assert math.exp(-(order - 1) ** 2 * variance / 2) > epsilon

    def test_order_capped_at_register_size(self):
        assert protocol.truncation_order(1e-6, 0.01, n_qubits=3) == 7

    def test_epsilon_range(self):
        with pytest.raises(InvalidInputError):
            protocol.truncation_order(1.0, 1.0)

    @pytest.mark.parametrize("variance, n_qubits", [(0.1, 9), (0.5, 6), (0.02, 10)])
    def test_error_within_bound(self, variance, n_qubits):
        exact = protocol.readout_distribution_gaussian(variance, n_qubits)
        truncated = protocol.readout_distribution_gaussian(variance, n_qubits, 0.01)
        order = protocol.truncation_order(variance, 0.01, n_qubits)
        bound = protocol.truncation_error_bound(variance, n_qubits, order)
        assert truncated.truncation_order == order
        assert np.max(np.abs(exact.probs - truncated.probs)) <= bound + 1e-15

    def test_untruncated_has_no_order(self):
        assert protocol.readout_distribution_gaussian(0.1, 5).truncation_order is None


class TestMapping:
    """Reflection and mapping of results onto positions"""

    def test_two_qubit_reflection(self):
        mapped = protocol.reflect_and_map(protocol.readout_distribution_gaussian(0.5, 2))
        assert mapped.x == pytest.approx([-math.pi, -math.pi / 2, 0.0, math.pi / 2])
        assert list(mapped.labels) == [2, 3, 0, 1]

    def test_positions_without_reflection(self):
        x = protocol.label_positions(4, reflect=False)
        assert x == pytest.approx([0.0, math.pi / 2, math.pi, 3 * math.pi / 2])

    def test_coupling_rescales_positions(self):
        assert protocol.label_positions(8, r=2.0) == pytest.approx(
            protocol.label_positions(8) / 2)
        with pytest.raises(InvalidInputError):
            protocol.label_positions(8, r=0.0)

    def test_mapped_probabilities_preserved(self):
        dist = protocol.readout_distribution_gaussian(0.2, 5)
        mapped = protocol.reflect_and_map(dist)
        assert np.all(np.diff(mapped.x) > 0)
        assert mapped.probs[mapped.labels == 0][0] == dist.probs[0]
        assert mapped.probs.sum() == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("variance", [0.1, 1.0])
    def test_nine_ions_resolve_variance(self, variance):
        dist = protocol.readout_distribution_gaussian(variance, 9, 0.01)
        mean, estimate = protocol.estimate_moments(protocol.reflect_and_map(dist))
        assert mean == pytest.approx(0.0, abs=1e-2)
        assert estimate == pytest.approx(variance, rel=0.1)

    def test_density_approaches_gaussian(self):
        variance = 0.1
        mapped = protocol.reflect_and_map(protocol.readout_distribution_gaussian(variance, 10))
        peak = 1 / math.sqrt(2 * math.pi * variance)
        assert protocol.continuum_deviation(mapped, variance) < 0.05 * peak


class TestResolution:
    """N_min, Lamb-Dicke check and flat regime"""

    @pytest.mark.parametrize("variance, expected", [
        (0.1, 10),
        (1.0, 8),
        (1e-10, 25),
        (1e6, 1),
    ])
    def test_n_min(self, variance, expected):
        assert protocol.n_min(variance) == expected

    @pytest.mark.parametrize("n_qubits", [3, 8, 12, 20])
    def test_min_resolvable_variance_inverts_n_min(self, n_qubits):
        assert protocol.n_min(protocol.min_resolvable_variance(n_qubits)) == n_qubits

    def test_n_min_decreases_with_variance(self):
        values = [protocol.n_min(v) for v in [1e-8, 1e-6, 1e-4, 1e-2, 1.0]]
        assert values == sorted(values, reverse=True)

    def test_lamb_dicke_pass(self):
        result = protocol.lamb_dicke_check(1.0, 9, 0.1)
        assert result.status is LambDickeStatus.PASS
        assert result.passed
        assert result.ratio == pytest.approx(0.1 / 3)

    def test_lamb_dicke_warning(self, caplog):
        result = protocol.lamb_dicke_check(100.0, 9, 1.0)
        assert result.status is LambDickeStatus.WARNING
        assert not result.passed
        assert "Lamb-Dicke" in caplog.text

    def test_lamb_dicke_rejects_bad_eta(self):
        with pytest.raises(InvalidInputError):
            protocol.lamb_dicke_check(1.0, 4, 0.0)

    def test_flat_regime(self):
        assert protocol.upper_variance_limit() == 10.0
        assert protocol.flat_regime(10.0)
        assert not protocol.flat_regime(9.99)

    def test_variance_scan_converges(self):
        variance = 0.01
        rows = protocol.variance_scan(variance, range(4, 15))
        assert [n for n, _ in rows] == list(range(4, 15))
        errors = {n: abs(v - variance) for n, v in rows}
        assert errors[14] < errors[6]
        assert rows[-1][1] == pytest.approx(variance, rel=0.1)


def test_mapped_variance_grows_with_input_variance():
    variances = np.geomspace(0.01, 5.0, 25)
    estimates = [
        protocol.estimate_moments(
            protocol.reflect_and_map(protocol.readout_distribution_gaussian(v, 9)))[1]
        for v in variances
    ]
    assert np.all(np.diff(estimates) > 0)
