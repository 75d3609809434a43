import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from critprobe import oracle
from critprobe.errors import DegenerateMode, DimensionTooLarge, NotHermitian
from critprobe.spectrum import ChainParams, bogoliubov_angle

SX = np.array([[0, 1], [1, 0]], dtype=complex)

real = st.floats(-3, 3)


def test_expm_quarter_turn_is_minus_i_sigma_x():
    np.testing.assert_allclose(oracle.expm_2x2(SX, math.pi / 2), -1j * SX, atol=1e-15)


def test_expm_half_turn_is_minus_identity():
    np.testing.assert_allclose(oracle.expm_2x2(SX, math.pi), -np.eye(2), atol=1e-15)


@given(real, real, real, real, st.floats(0, 10))
def test_expm_matches_scipy(h0, hx, hy, hz, t):
    H = np.array([[h0 + hz, hx - 1j * hy], [hx + 1j * hy, h0 - hz]])
    np.testing.assert_allclose(oracle.expm_2x2(H, t), scipy.linalg.expm(-1j * H * t), atol=1e-11)


def test_expm_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        oracle.expm_2x2(np.array([[0, 1], [0, 0]]), 1.0)
    with pytest.raises(ValueError):
        oracle.expm_2x2(np.eye(3), 1.0)


@given(st.floats(0.05, math.pi - 0.05), st.floats(-3, 3), st.floats(0.1, 1))
def test_pair_block_ground_state(a, lam, gamma):
    h = oracle.pair_block(a, lam, gamma)
    w, v = np.linalg.eigh(h)
    theta = bogoliubov_angle(a, lam, gamma)
    expected = np.array([math.cos(theta / 2), math.sin(theta / 2)])
    assert w[0] == pytest.approx(0.0, abs=1e-12)
    assert abs(abs(np.dot(v[:, 0], expected)) - 1) < 1e-12


def test_fock_oracle_frozen_values():
    p = ChainParams(8, 0.7, 0.6, 0.2)
    # values from the dense 32-dimensional evolution
    assert oracle.fock_evolution_factor(p, 0.5) == pytest.approx(
        0.9925643748461055 + 0.0007993620116819901j, abs=1e-12
    )
    assert oracle.fock_evolution_factor(p, 11.0) == pytest.approx(
        0.8858190697500642 + 0.013729435982016383j, abs=1e-12
    )


def test_fock_oracle_matches_pair_product():
    p = ChainParams(10, -0.4, 0.9, 0.25)
    for t in (0.0, 1.3, 7.7):
        assert oracle.fock_evolution_factor(p, t) == pytest.approx(
            oracle.pair_evolution_factor(p, t), abs=1e-10
        )


def test_fock_oracle_limits():
    with pytest.raises(DimensionTooLarge):
        oracle.fock_evolution_factor(ChainParams(14, 0.5, 1.0, 0.1), 1.0)
    with pytest.raises(DegenerateMode):
        oracle.pair_evolution_factor(ChainParams(8, 1.0, 0.5, 0.1), 1.0)


def test_vacuum_phase_adds_energy_difference():
    p = ChainParams(8, 0.4, 0.8, 0.1)
    plain = oracle.pair_evolution_factor(p, 2.0)
    shifted = oracle.pair_evolution_factor(p, 2.0, vacuum_phase=True)
    assert abs(plain) == pytest.approx(abs(shifted), abs=1e-13)
    assert abs(plain - shifted) > 1e-3
