import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from critprobe.errors import DegenerateMode, InvalidParams
from critprobe.spectrum import (
    ChainParams,
    bogoliubov_angle,
    build_mode_table,
    dispersion,
    dtheta_dgamma,
    dtheta_dlambda,
    excitation_energy,
    ground_energy,
    scaling_sum,
)

momenta = st.floats(0.01, math.pi - 0.01)
fields = st.floats(-4, 4)
anisotropy = st.floats(0.05, 1.0)


def test_params_validation():
    with pytest.raises(InvalidParams):
        ChainParams(7, 0.5, 1.0)
    with pytest.raises(InvalidParams):
        ChainParams(2, 0.5, 1.0)
    with pytest.raises(InvalidParams):
        ChainParams(8, math.nan, 1.0)
    with pytest.raises(InvalidParams):
        ChainParams(8, 0.5, 1.0, g=-0.1)
    assert ChainParams(8.0, 1, 1).N == 8


def test_replace_revalidates():
    p = ChainParams(8, 0.5, 1.0, 0.1)
    assert p.replace(lam=2.0).lam == 2.0
    with pytest.raises(InvalidParams):
        p.replace(N=9)


def test_mode_table_n8():
    table = build_mode_table(ChainParams(8, 0.5, 1.0, 0.1))
    assert table.k.tolist() == [1, 2, 3, 0, -4]
    # frozen from an independent hand evaluation of atan2 / hypot
    np.testing.assert_allclose(
        table.theta[0], [1.2858722, 2.03444394, 2.61168986, 0.0, math.pi], atol=1e-8
    )
    np.testing.assert_allclose(
        table.omega[0], [0.73681288, 1.11803399, 1.39896633, 0.5, 1.5], atol=1e-8
    )
    assert table.n_paired == 3
    assert [r.k for r in table.unpaired] == [0, -4]


def test_unpaired_angles_are_exact():
    # k = 0 sits at theta = 0 for lam < 1 and theta = pi for lam > 1
    low = build_mode_table(ChainParams(16, 0.3, 1.0))
    high = build_mode_table(ChainParams(16, 1.7, 1.0))
    assert low.theta[0, -2] == 0.0 and high.theta[0, -2] == math.pi
    assert low.theta[0, -1] == math.pi


@given(momenta, fields, anisotropy)
def test_atan2_agrees_with_arccos(a, lam, gamma):
    eps, omega = dispersion(a, lam, gamma)
    theta = bogoliubov_angle(a, lam, gamma)
    # sin a > 0 puts theta in (0, pi), where arccos is unambiguous
    assert theta == pytest.approx(math.acos(eps / omega), abs=1e-9)


def test_gapless_mode_is_flagged():
    theta, flag = bogoliubov_angle(0.0, 1.0, 0.5, with_flag=True)
    assert flag and theta == 0.0
    table = build_mode_table(ChainParams(200, 0.9, 1.0, 0.1))
    assert table.any_degenerate
    with pytest.raises(DegenerateMode):
        table.require_gapped()


def test_g_zero_branches_coincide():
    table = build_mode_table(ChainParams(32, 0.4, 0.8))
    np.testing.assert_array_equal(table.theta[0], table.theta[1])
    np.testing.assert_array_equal(table.theta[0], table.theta[2])


@given(momenta, fields, anisotropy)
def test_dtheta_dlambda_finite_difference(a, lam, gamma):
    _, omega = dispersion(a, lam, gamma)
    if omega < 0.05:
        return
    h = 1e-6
    fd = (bogoliubov_angle(a, lam + h, gamma) - bogoliubov_angle(a, lam - h, gamma)) / (2 * h)
    assert dtheta_dlambda(a, lam, gamma) == pytest.approx(fd, rel=1e-5, abs=1e-7)


@given(momenta, fields, anisotropy)
def test_dtheta_dgamma_finite_difference(a, lam, gamma):
    _, omega = dispersion(a, lam, gamma)
    if omega < 0.05:
        return
    h = 1e-6
    fd = (bogoliubov_angle(a, lam, gamma + h) - bogoliubov_angle(a, lam, gamma - h)) / (2 * h)
    assert dtheta_dgamma(a, lam, gamma) == pytest.approx(fd, rel=1e-5, abs=1e-7)


def test_derivative_at_gapless_mode_raises():
    with pytest.raises(DegenerateMode):
        dtheta_dlambda(np.array([0.0, 1.0]), 1.0, 0.5)


def _mp_scaling_sum(N, lam, gamma):
    mpmath.mp.dps = 40
    total = mpmath.mpf(0)
    for k in range(1, N // 2 + 1):
        a = 2 * mpmath.pi * k / N
        w2 = (mpmath.cos(a) - lam) ** 2 + (gamma * mpmath.sin(a)) ** 2
        total += (gamma * mpmath.sin(a) / w2) ** 2
    return float(total)


@pytest.mark.parametrize("N", [16, 128, 1024])
def test_scaling_sum_matches_extended_precision(N):
    p = ChainParams(N, 1.0, 0.5)
    assert scaling_sum(p) == pytest.approx(_mp_scaling_sum(N, 1.0, 0.5), rel=1e-12)


def test_scaling_sum_frozen_values():
    assert scaling_sum(ChainParams(128, 1.0, 0.5)) == pytest.approx(2558.0, rel=1e-12)
    assert scaling_sum(ChainParams(128, 1.0, 0.5), "gamma") == pytest.approx(28.444444444444446, rel=1e-12)
    with pytest.raises(ValueError):
        scaling_sum(ChainParams(128, 1.0, 0.5), "mu")


def test_scaling_sum_grows_quadratically_at_criticality():
    s1 = scaling_sum(ChainParams(256, 1.0, 0.5))
    s2 = scaling_sum(ChainParams(512, 1.0, 0.5))
    assert s2 / s1 == pytest.approx(4.0, rel=0.02)
    off = scaling_sum(ChainParams(512, 3.0, 0.5)) / scaling_sum(ChainParams(256, 3.0, 0.5))
    assert off == pytest.approx(2.0, rel=0.02)


def test_ground_energy_ising_n8():
    # -1/2 sum_k omega_k on the 8 momenta, evaluated by hand
    a = 2 * np.pi * np.arange(-4, 4) / 8
    expected = -0.5 * np.sum(np.hypot(np.cos(a) - 0.5, np.sin(a)))
    assert ground_energy(ChainParams(8, 0.5, 1.0)) == pytest.approx(expected, abs=1e-14)
    assert ground_energy(ChainParams(8, 0.5, 1.0)) == pytest.approx(-4.253813193819751, abs=1e-12)


def test_excitation_energy_adds_mode_gaps():
    p = ChainParams(8, 0.5, 1.0)
    e0 = excitation_energy(p, ())
    e1 = excitation_energy(p, (1, -1))
    _, omega = dispersion(2 * np.pi / 8, 0.5, 1.0)
    assert e1 - e0 == pytest.approx(2 * omega, abs=1e-14)
    with pytest.raises(InvalidParams):
        excitation_energy(p, (4,))
