import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from critprobe import oracle
from critprobe.dephasing import (
    build_trajectory,
    decoherence_factor,
    dephasing_phase,
    evolve,
    same_branch_factor,
)
from critprobe.errors import DegenerateMode
from critprobe.geometry import geometric_phase
from critprobe.spectrum import ChainParams, build_mode_table

chains = st.builds(
    ChainParams,
    st.sampled_from([8, 16, 40]),
    st.floats(-3, 3),
    st.floats(0, 1),
    st.floats(0, 0.3),
)


def _gapped(p):
    return not build_mode_table(p).any_degenerate


@given(chains, st.floats(0, 20))
def test_closed_form_matches_pair_oracle(p, t):
    if not _gapped(p):
        return
    closed = decoherence_factor(build_mode_table(p), t)
    assert abs(closed - oracle.pair_evolution_factor(p, t)) < 1e-10


@given(chains, st.floats(0, 20))
def test_vacuum_phase_matches_oracle(p, t):
    if not _gapped(p):
        return
    closed = decoherence_factor(build_mode_table(p), t, vacuum_phase=True)
    assert abs(closed - oracle.pair_evolution_factor(p, t, vacuum_phase=True)) < 1e-10


@given(chains)
def test_identities(p):
    table = build_mode_table(p)
    t = np.linspace(0, 20, 9)
    assert decoherence_factor(table, 0.0, allow_degenerate=True) == pytest.approx(1.0, abs=1e-12)
    for branch in ("up", "down", "zero"):
        np.testing.assert_allclose(same_branch_factor(table, t, branch), 1.0, atol=1e-12)
    free = build_mode_table(p.replace(g=0.0))
    np.testing.assert_allclose(decoherence_factor(free, t, allow_degenerate=True), 1.0, atol=1e-12)


@given(chains, st.floats(0, 20))
def test_echo_modulus_bounded(p, t):
    f = decoherence_factor(build_mode_table(p), t, allow_degenerate=True)
    assert abs(f) <= 1 + 1e-12


def test_scalar_and_array_agree(gapped_chain):
    table = build_mode_table(gapped_chain)
    times = np.array([0.3, 4.0, 9.5])
    arr = decoherence_factor(table, times)
    for t, f in zip(times, arr):
        assert decoherence_factor(table, t) == f


def test_rejects_negative_time_and_degenerate(gapped_chain):
    with pytest.raises(ValueError):
        decoherence_factor(build_mode_table(gapped_chain), -1.0)
    with pytest.raises(DegenerateMode):
        decoherence_factor(build_mode_table(ChainParams(200, 0.9, 1.0, 0.1)), 1.0)


def test_evolve_keeps_populations(gapped_chain):
    table = build_mode_table(gapped_chain)
    rho = evolve(table, math.pi / 5, 3.0)
    assert rho.rho11 == pytest.approx(math.cos(math.pi / 5) ** 2)
    assert rho.is_valid()
    assert abs(rho.rho12) <= math.cos(math.pi / 5) * math.sin(math.pi / 5) + 1e-15


def test_g_zero_azimuth_is_minus_mu_t():
    traj = build_trajectory(ChainParams(32, 0.5, 0.7, 0.0, mu=1.3), math.pi / 5, 4.0)
    np.testing.assert_allclose(traj.azimuth_unwrapped, -1.3 * traj.times, atol=1e-12)
    assert not traj.collapse_flag


def test_isotropic_gapped_azimuth_is_flat():
    # gamma = 0 with lam +- g > 1 leaves the ground state unchanged
    traj = build_trajectory(ChainParams(40, 1.5, 0.0, 0.1), math.pi / 5, 10.0)
    np.testing.assert_allclose(traj.azimuth_unwrapped, 0.0, atol=1e-12)
    assert geometric_phase(traj).phi_g == pytest.approx(0.0, abs=1e-12)


def test_trajectory_is_self_convergent():
    p = ChainParams(200, 0.7, 0.6, 0.1)
    coarse = dephasing_phase(p, math.pi / 5, 10.0, cap=4096)
    fine = dephasing_phase(p, math.pi / 5, 10.0, cap=8192)
    assert abs(coarse.phi_g - fine.phi_g) < 1e-6


def test_trajectory_grid_meets_step_floor(gapped_chain):
    traj = build_trajectory(gapped_chain, math.pi / 5, 10.0)
    assert traj.times[0] == 0.0 and traj.T == 10.0
    assert np.all(np.diff(traj.times) > 0)
    assert np.max(np.abs(np.diff(traj.azimuth_unwrapped))) < 0.3


def test_cap_reached_is_reported():
    traj = build_trajectory(ChainParams(200, 0.7, 0.6, 0.1), math.pi / 5, 10.0, cap=32)
    assert traj.cap_reached
    assert traj.steps_used <= 32


def test_quarter_angle_phase_is_zero_or_pi():
    for lam in (0.3, 0.95, 1.3):
        res = dephasing_phase(ChainParams(400, lam, 1.0, 0.1), math.pi / 4, 10.0)
        assert min(abs(res.phi_g), abs(abs(res.phi_g) - math.pi)) < 1e-9
