#!/usr/bin/env python3
"""
Oracle tests: joint state-vector runs against the analytic readout
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from config.settings import ProtocolConfig
from core import oracle
from core.cvmode import GaussianSpec, Grid, auto_grid, gaussian_state, moments, superpose
from core.errors import DomainCoverageError, OracleCapError
from core.protocol import readout_distribution_gaussian


def prepared_mode(variance, config, any_rotation=False):
    spec = GaussianSpec(variance)
    grid = auto_grid(spec, max_shift=config.r * (config.register_size - 1),
                     any_rotation=any_rotation)
    return gaussian_state(spec, grid)


@pytest.mark.parametrize("variance, n_qubits", [(0.5, 3), (0.5, 4), (0.1, 6)])
def test_oracle_matches_closed_form(variance, n_qubits):
    config = ProtocolConfig(n_qubits=n_qubits)
    mode = prepared_mode(variance, config)
    reference = readout_distribution_gaussian(variance, n_qubits)
    assert oracle.oracle_vs_analytic(mode, config, reference) < 1e-6


def test_oracle_matches_grid_characteristic_function():
    config = ProtocolConfig(n_qubits=4, r=0.7)
    mode = prepared_mode(0.3, config)
    assert oracle.oracle_vs_analytic(mode, config) < 1e-9


def test_quadrature_angle_measures_rotated_variance():
    variance = 0.5
    config = ProtocolConfig(n_qubits=3, theta=math.pi / 2)
    mode = prepared_mode(variance, config, any_rotation=True)
    # a quarter turn measures 2p, whose variance is 1/variance
    reference = readout_distribution_gaussian(1 / variance, 3)
    assert oracle.oracle_vs_analytic(mode, config, reference) < 1e-6


def test_joint_state_is_normalized():
    config = ProtocolConfig(n_qubits=3)
    joint = oracle.run_protocol(prepared_mode(0.4, config), config)
    assert joint.branches.shape == (8, joint.grid.n_points)
    assert oracle.total_norm(joint) == pytest.approx(1.0, abs=1e-9)
    assert oracle.branch_probabilities(joint).sum() == pytest.approx(1.0, abs=1e-9)


def test_readout_from_joint():
    config = ProtocolConfig(n_qubits=3)
    joint = oracle.run_protocol(prepared_mode(0.4, config), config)
    dist = oracle.readout_from_joint(joint)
    assert dist.size == 8
    assert np.allclose(dist.probs, oracle.branch_probabilities(joint), atol=1e-9)


def test_zero_coupling_leaves_register_in_ground_state():
    config = ProtocolConfig(n_qubits=3, r=0.0)
    joint = oracle.run_protocol(prepared_mode(1.0, config), config)
    assert oracle.readout_from_joint(joint).probs[0] == pytest.approx(1.0, abs=1e-12)


def test_conditional_states():
    variance = 4.0
    config = ProtocolConfig(n_qubits=3)
    joint = oracle.run_protocol(prepared_mode(variance, config), config)
    outcomes = [oracle.conditional_state(joint, label) for label in range(joint.size)]
    assert sum(o.probability for o in outcomes) == pytest.approx(1.0, abs=1e-9)

    centre = outcomes[0]
    assert not centre.is_empty
    assert centre.state.norm() == pytest.approx(1.0, abs=1e-10)
    # the readout localizes the mode modulo 2 pi
    assert moments(centre.state)['var_x'] < variance

    x, density = oracle.conditional_position(joint, 0)
    assert np.sum(density) * joint.grid.dx == pytest.approx(1.0, abs=1e-9)
    assert len(x) == joint.grid.n_points


def test_conditional_state_label_range():
    config = ProtocolConfig(n_qubits=2)
    joint = oracle.run_protocol(prepared_mode(1.0, config), config)
    with pytest.raises(ValueError):
        oracle.conditional_state(joint, 4)


def test_qubit_cap():
    config = ProtocolConfig(n_qubits=9)
    mode = gaussian_state(GaussianSpec(1.0), auto_grid(GaussianSpec(1.0)))
    with pytest.raises(OracleCapError):
        oracle.run_protocol(mode, config)


def test_grid_too_small_for_coupling():
    config = ProtocolConfig(n_qubits=4)
    mode = gaussian_state(GaussianSpec(0.5), Grid(p_min=-6.0, dp=0.05, n_points=256))
    with pytest.raises(DomainCoverageError) as excinfo:
        oracle.run_protocol(mode, config)
    assert excinfo.value.required_p_max > mode.grid.p_max


def test_coupling_below_grid_resolution():
    config = ProtocolConfig(n_qubits=3, r=1e-13)
    joint = oracle.run_protocol(prepared_mode(0.5, config), config)
    assert oracle.readout_from_joint(joint).probs[0] == pytest.approx(1.0, abs=1e-12)


def test_oracle_is_linear():
    config = ProtocolConfig(n_qubits=3)
    spec = GaussianSpec(0.5, mean_x=1.5)
    grid = auto_grid(spec, max_shift=config.register_size - 1)
    left = gaussian_state(GaussianSpec(0.5), grid)
    right = gaussian_state(spec, grid)
    cat = superpose([left, right], [1.0, 1.0])
    scale = np.sqrt(np.sum(np.abs(left.psi_p + right.psi_p) ** 2) * grid.dp)

    joint = oracle.run_protocol(cat, config)
    expected = (oracle.run_protocol(left, config).branches
                + oracle.run_protocol(right, config).branches) / scale
    assert np.max(np.abs(joint.branches - expected)) < 1e-10


@pytest.mark.parametrize("variance", [0.1, 1.0])
def test_readout_symmetric_under_exchange(variance):
    config = ProtocolConfig(n_qubits=4)
    probs = oracle.readout_from_joint(
        oracle.run_protocol(prepared_mode(variance, config), config)).probs
    labels = np.arange(1, 16)
    assert np.max(np.abs(probs[labels] - probs[16 - labels])) <= 1e-8


@pytest.mark.parametrize("theta", [math.pi / 3, -0.8])
def test_rotated_input_matches_closed_form(theta):
    variance = 0.5
    config = ProtocolConfig(n_qubits=4, theta=theta)
    mode = prepared_mode(variance, config, any_rotation=True)
    # x cos(theta) + 2 p sin(theta) on a minimum-uncertainty state
    rotated_variance = variance * math.cos(theta) ** 2 + math.sin(theta) ** 2 / variance
    reference = readout_distribution_gaussian(rotated_variance, 4)
    assert oracle.oracle_vs_analytic(mode, config, reference) < 1e-6
