import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optomech_router.errors import InvalidParameter, Multistability, NonConvergence, NotAttainable, StepSizeTooLarge
from optomech_router.steadystate import (
    all_fixed_points,
    integrate_mean_field,
    pump_for_coupling,
    solve_steady,
    steady_residual,
)


def test_unpumped(preset1):
    p, _ = preset1
    s = solve_steady(p, 0.0)
    assert s.alpha == 0 and s.beta == 0 and s.G_eff == 0
    assert s.Delta_prime == p.Delta


def test_pump_for_coupling_round_trip(preset1):
    p, _ = preset1
    for ratio in (1e-4, 0.1, 0.2):
        G = ratio * p.omega_m
        s = solve_steady(p, pump_for_coupling(p, G))
        assert s.G_eff == pytest.approx(G, rel=1e-8)
        assert s.residual <= 1e-10


def test_alpha_magnitude_at_tenth_omega_m(preset1):
    p, _ = preset1
    s = solve_steady(p, pump_for_coupling(p, 0.1 * p.omega_m))
    assert abs(s.alpha) == pytest.approx(2.52e3, rel=2e-3)


def test_closed_form_pump_small_coupling(preset1):
    p, _ = preset1
    G = 1e-4 * p.omega_m
    eps = pump_for_coupling(p, G)
    s = solve_steady(p, eps)
    assert eps == pytest.approx((G / p.g0) * abs(2 * p.kappa + 1j * s.Delta_prime), rel=1e-8)


def test_state_relations(preset1):
    p, _ = preset1
    s = solve_steady(p, pump_for_coupling(p, 0.2 * p.omega_m))
    assert s.G_eff == pytest.approx(p.g0 * abs(s.alpha), rel=1e-14)
    assert s.Delta_prime == pytest.approx(p.Delta + p.g0 * 2 * s.beta.real, rel=1e-12)
    assert steady_residual(p, pump_for_coupling(p, 0.2 * p.omega_m), s.alpha, s.beta) <= 1e-10


def test_zero_target(preset1):
    assert pump_for_coupling(preset1[0], 0.0) == 0.0


def test_bad_inputs(preset1):
    p, _ = preset1
    with pytest.raises(InvalidParameter):
        solve_steady(p, -1.0)
    with pytest.raises(InvalidParameter):
        pump_for_coupling(p, -1.0)


def test_lower_branch_inside_bistable_window(preset1):
    p, _ = preset1
    eps = pump_for_coupling(p, 0.2 * p.omega_m)
    assert len(all_fixed_points(p, eps)) == 3
    s = solve_steady(p, eps)
    assert s.G_eff == pytest.approx(0.2 * p.omega_m, rel=1e-8)


def test_fixed_points_satisfy_equations(preset1):
    p, _ = preset1
    eps = pump_for_coupling(p, 0.2 * p.omega_m)
    for fp in all_fixed_points(p, eps):
        assert steady_residual(p, eps, fp.alpha, fp.beta) <= 1e-10


def test_multistability_reported():
    from optomech_router.model import derive_constants, paper_preset

    # strong single-photon coupling and a broad cavity: two seeds settle on
    # different branches inside the bistable window
    raw = dataclasses.replace(paper_preset()[0], mirror_mass_m=1e-21, cavity_length_L=1e-4)
    p = derive_constants(dataclasses.replace(raw, kappa=0.2 * raw.omega_m))
    c = 2 * p.g0**2 * p.omega_m / (p.gamma_m**2 + p.omega_m**2)
    x = 0.3 * p.Delta / c
    eps = math.sqrt(x * ((2 * p.kappa) ** 2 + (p.Delta - c * x) ** 2))
    assert len(all_fixed_points(p, eps)) == 3
    with pytest.raises(Multistability) as info:
        solve_steady(p, eps)
    assert len(info.value.fixed_points) == 2
    for fp in info.value.fixed_points:
        assert steady_residual(p, eps, fp.alpha, fp.beta) <= 1e-10


def test_not_attainable_past_fold():
    from optomech_router.model import derive_constants, paper_preset

    raw = dataclasses.replace(paper_preset()[0], mirror_mass_m=1e-21, cavity_length_L=1e-4)
    p = derive_constants(raw)
    c = 2 * p.g0**2 * p.omega_m / (p.gamma_m**2 + p.omega_m**2)
    with pytest.raises(NotAttainable):
        pump_for_coupling(p, p.g0 * math.sqrt(0.9 * p.Delta / c))


def test_iteration_cap(preset1):
    p, _ = preset1
    with pytest.raises(NonConvergence) as info:
        solve_steady(p, pump_for_coupling(p, 0.1 * p.omega_m), max_iter=2)
    assert info.value.residual is not None


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-5, 0.2))
def test_monotone_and_residual(ratio):
    from optomech_router.model import derive_constants, paper_preset

    p = derive_constants(paper_preset()[0])
    eps = pump_for_coupling(p, ratio * p.omega_m)
    lo = solve_steady(p, 0.99 * eps)
    hi = solve_steady(p, eps)
    assert hi.G_eff > lo.G_eff
    assert hi.residual <= 1e-10


def test_unforced_decay(preset1):
    p, _ = preset1
    # a heavily damped resonator so that the ring-down fits in a short run
    q = dataclasses.replace(p, gamma_m=0.1 * p.omega_m)
    traj = integrate_mean_field(q, 0.0, 2e-4, 0.02 / q.omega_m, initial=(1.0 + 0j, 0.5j))
    a, b = traj.endpoint
    assert abs(a) < 1e-6
    assert abs(b) < 1e-6


def test_ode_endpoint_stable_in_t_end(preset1):
    p, _ = preset1
    eps = pump_for_coupling(p, 0.1 * p.omega_m)
    dt = 0.2 / p.omega_m
    a1, _ = integrate_mean_field(p, eps, 2.5e-3, dt, ramp_time=2e-3).endpoint
    a2, _ = integrate_mean_field(p, eps, 5e-3, dt, ramp_time=2e-3).endpoint
    assert abs(a2 - a1) / abs(a1) < 1e-9


def test_step_too_large(preset1):
    p, _ = preset1
    eps = pump_for_coupling(p, 0.1 * p.omega_m)
    with pytest.raises(StepSizeTooLarge):
        integrate_mean_field(p, eps, 1e-3, 20.0 / p.omega_m, ramp_time=5e-4)


def test_trajectory_shape(preset1):
    p, _ = preset1
    traj = integrate_mean_field(p, 1e6, 1e-4, 0.1 / p.omega_m, ramp_time=5e-5, max_samples=11)
    assert traj.t[0] == 0.0 and traj.t[-1] == pytest.approx(1e-4)
    assert traj.alpha.shape == traj.beta.shape == traj.t.shape
    assert np.all(np.diff(traj.t) > 0)
