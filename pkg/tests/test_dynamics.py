import cmath
import io
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from darkcavity.dynamics import (DriftSystem, PhaseSchedule, Trajectory, determinant,
                                 drift, drift_three, drift_two, eigenvalues, integrate,
                                 solve_fixed_point, stability, steady_state_closed_form,
                                 steady_state_solve)
from darkcavity.errors import SingularSystemError, StepSizeError
from darkcavity.params import ThreeModeParams, TwoModeParams

from conftest import PHI_DARK1, PHI_DARK2
from helpers import random_three_mode, random_two_mode, rel_err

J5 = math.sqrt(5) / 2


def balanced_gain(lam=0.1):
    return TwoModeParams(1, 1, 1, -1, J5, lam, lam)


def test_drift_two_fig2(fig2):
    s = drift_two(fig2)
    expected = np.array([[-(1j + 0.5), -1j * J5], [-1j * J5, -(1j + 0.5)]])
    np.testing.assert_allclose(s.M, expected, atol=1e-15)
    np.testing.assert_allclose(s.B, [-0.1j, -0.1j], atol=1e-15)
    assert s.M[0, 1] == pytest.approx(-1.118033988749895j)


def test_drift_undriven(fig2):
    assert not drift_two(fig2.with_drives(0, 0)).B.any()


def test_det_fig2(fig2):
    # (i + 1/2)^2 + 5/4 expanded by hand
    assert determinant(drift_two(fig2).M) == pytest.approx(0.5 + 1j, abs=1e-14)
    assert determinant(drift_two(fig2).M) == pytest.approx(np.linalg.det(drift_two(fig2).M), abs=1e-14)


def test_determinant_3x3_matches_numpy(rng):
    for _ in range(20):
        M = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert determinant(M) == pytest.approx(np.linalg.det(M), rel=1e-12)


def test_drift_three_blocks(fig2, fig4):
    s = drift_three(ThreeModeParams(fig2, 0.3, 0.7, 0.0))
    np.testing.assert_array_equal(s.M[:2, :2], drift_two(fig2).M)
    assert not s.M[2, :2].any() and not s.M[:2, 2].any()
    s4 = drift_three(fig4)
    assert s4.M[0, 2] == s4.M[2, 0] == pytest.approx(-1j * math.sqrt(6) / 2)
    assert s4.B[2] == 0


def test_drift_symmetric_not_hermitian(rng):
    for _ in range(50):
        for p in (random_two_mode(rng), random_three_mode(rng)):
            M = drift(p).M
            np.testing.assert_array_equal(M, M.T)
            assert not np.allclose(M, M.conj().T)
            if M.shape[0] == 3:
                assert drift(p).B[2] == 0


def test_drift_system_is_immutable(fig2):
    s = drift_two(fig2)
    with pytest.raises(ValueError):
        s.M[0, 0] = 1


def test_closed_form_dark_cavity1(fig2):
    s = steady_state_closed_form(fig2.with_phi(PHI_DARK1))
    assert s.n1 <= 1e-24
    assert s.alpha2 == pytest.approx(-0.08 - 0.04j, abs=1e-15)
    assert s.n2 == pytest.approx(0.008, rel=1e-12)


def test_closed_form_phi0_symmetric(fig2):
    s = steady_state_closed_form(fig2)
    # symmetric drive excites only the symmetric mode: alpha = -0.1 i / (1/2 + i (1 + J))
    expected = -0.1j / (0.5 + 1j * (1 + J5))
    assert s.alpha1 == pytest.approx(expected, abs=1e-15)
    assert s.alpha2 == pytest.approx(expected, abs=1e-15)
    assert s.alpha1 == pytest.approx(-0.044721359549995794 - 0.010557280900008416j, abs=1e-15)
    assert s.n1 == pytest.approx(0.0021114561800016834, rel=1e-12)


def test_closed_form_undriven(fig2):
    s = steady_state_closed_form(fig2.with_drives(0, 0))
    assert s.alpha1 == 0 and s.alpha2 == 0


def test_solve_matches_closed_form_fig2(fig2):
    for phi in np.linspace(-math.pi, math.pi, 41):
        p = fig2.with_phi(phi)
        a = steady_state_closed_form(p).as_vector()
        b = steady_state_solve(drift_two(p)).as_vector()
        assert rel_err(a, b) < 1e-12


def test_balanced_gain_is_singular():
    p = balanced_gain()
    with pytest.raises(SingularSystemError) as info:
        steady_state_solve(drift_two(p))
    assert abs(info.value.det) < 1e-15
    with pytest.raises(SingularSystemError):
        steady_state_closed_form(p)


def test_solve_zero_drive(fig4):
    s = steady_state_solve(drift(fig4.with_base(fig4.base.with_drives(0, 0))))
    assert s.as_vector() == [0, 0, 0]


def test_stability_fig2(fig2):
    st_ = stability(drift_two(fig2))
    expected = sorted([-0.5 - 1j * (1 + J5), -0.5 - 1j * (1 - J5)], key=lambda z: z.imag)
    got = sorted(st_.eigenvalues, key=lambda z: z.imag)
    np.testing.assert_allclose(got, expected, atol=1e-14)
    assert st_.is_stable


def test_stability_lossless():
    st_ = stability(drift_two(TwoModeParams(0.3, -1.2, 0, 0, 0.8, 0.1, 0.1)))
    assert st_.max_real == pytest.approx(0, abs=1e-15)
    assert not st_.is_stable


def test_stability_balanced_gain():
    assert not stability(drift_two(balanced_gain())).is_stable


def test_quadratic_eigenvalues_match_numpy(rng):
    for _ in range(100):
        M = drift_two(random_two_mode(rng)).M
        got = np.sort_complex(eigenvalues(M))
        np.testing.assert_allclose(got, np.sort_complex(np.linalg.eigvals(M)), atol=1e-12)


# --- invariants over random draws -------------------------------------------

params_two = st.builds(
    TwoModeParams,
    delta1=st.floats(-3, 3), delta2=st.floats(-3, 3),
    gamma1=st.floats(0.1, 3), gamma2=st.floats(0.1, 3), J=st.floats(0.1, 3),
    lambda1_mag=st.floats(0.01, 1), lambda2_mag=st.floats(0.01, 1),
    phi=st.floats(-math.pi, math.pi),
)


@given(params_two)
def test_dual_path(p):
    a = steady_state_closed_form(p).as_vector()
    b = steady_state_solve(drift_two(p)).as_vector()
    assert rel_err(a, b) < 1e-12


@given(params_two, st.sampled_from([0, 1]), st.lists(st.floats(-10, 10), min_size=2, max_size=8))
def test_phase_independence_one_drive_off(p, which, phis):
    p = p.with_drives(0, p.lambda2_mag) if which == 0 else p.with_drives(p.lambda1_mag, 0)
    ref = steady_state_closed_form(p.with_phi(phis[0]))
    for phi in phis[1:]:
        s = steady_state_closed_form(p.with_phi(phi))
        assert s.n1 == pytest.approx(ref.n1, rel=1e-14, abs=1e-300)
        assert s.n2 == pytest.approx(ref.n2, rel=1e-14, abs=1e-300)


@given(params_two, st.floats(0.01, 100))
def test_linear_in_drive(p, scale):
    a = steady_state_closed_form(p)
    b = steady_state_closed_form(p.with_drives(scale * p.lambda1_mag, scale * p.lambda2_mag))
    assert rel_err(b.as_vector(), [scale * x for x in a.as_vector()]) < 1e-12
    assert b.n1 == pytest.approx(scale ** 2 * a.n1, rel=1e-12)


@given(params_two, st.floats(-10, 10))
def test_global_phase(p, theta):
    system = drift_two(p)
    rotated = DriftSystem(system.M, system.B * cmath.exp(-1j * theta))
    a, b = steady_state_solve(system), steady_state_solve(rotated)
    expected = [x * cmath.exp(-1j * theta) for x in a.as_vector()]
    assert rel_err(b.as_vector(), expected) < 1e-12
    assert b.n1 == pytest.approx(a.n1, rel=1e-12)
    assert b.n2 == pytest.approx(a.n2, rel=1e-12)


@given(params_two, st.integers(-5, 5))
def test_periodic_in_phi(p, k):
    a = steady_state_closed_form(p)
    b = steady_state_closed_form(p.with_phi(p.phi + 2 * math.pi * k))
    assert b.n1 == pytest.approx(a.n1, rel=1e-12)
    assert b.n2 == pytest.approx(a.n2, rel=1e-12)


def test_passive_systems_stable(rng):
    for _ in range(200):
        assert stability(drift(random_two_mode(rng))).max_real < 0
        assert stability(drift(random_three_mode(rng))).max_real < 0


# --- integration ---------------------------------------------------------------

def test_integrate_constant_phase_reaches_steady_state(fig2):
    traj = integrate(fig2, t_final=40, dt=0.01)
    assert np.linalg.norm(traj.final - solve_fixed_point(drift(fig2))) < 1e-8
    assert traj.times[-1] == 40 and len(traj.times) == 4001


def test_integrate_pure_decay(fig4):
    p = fig4.with_base(fig4.base.with_drives(0, 0))
    traj = integrate(p, initial=[1, -1j, 0.5], t_final=60, dt=0.01)
    assert np.linalg.norm(traj.final) < 1e-10


def test_integrate_matches_exact_solution(fig4):
    A0 = np.array([0.1, 0.2j, -0.1])
    traj = integrate(fig4, initial=A0, t_final=3, dt=0.01)
    M, Ass = drift(fig4).M, solve_fixed_point(drift(fig4))
    for t, A in zip(traj.times[::50], traj.amplitudes[::50]):
        np.testing.assert_allclose(A, Ass + expm(M * t) @ (A0 - Ass), atol=1e-11)


def test_integrator_fourth_order(fig2):
    M, Ass = drift(fig2).M, solve_fixed_point(drift(fig2))
    exact = Ass + expm(M * 4.0) @ (-Ass)
    errs = [np.linalg.norm(integrate(fig2, t_final=4.0, dt=dt).final - exact) for dt in (0.04, 0.02)]
    assert 12 <= errs[0] / errs[1] <= 20


def test_adiabatic_transfer(fig2):
    a0 = solve_fixed_point(drift(fig2.with_phi(PHI_DARK1)))
    sched = PhaseSchedule.ramp(PHI_DARK1, PHI_DARK2, 10, 110)
    traj = integrate(fig2, initial=a0, schedule=sched, t_final=150, dt=0.01)
    target = solve_fixed_point(drift(fig2.with_phi(PHI_DARK2)))
    assert np.linalg.norm(traj.final - target) < 1e-4
    n = np.abs(traj.amplitudes) ** 2
    assert n[0, 0] < 1e-24 and n[-1, 1] < 1e-12
    assert n[-1, 0] == pytest.approx(0.008, rel=1e-6)
    assert traj.phi_of_t[0] == PHI_DARK1 and traj.phi_of_t[-1] == PHI_DARK2


def test_step_size_rejected(fig2):
    with pytest.raises(StepSizeError):
        integrate(fig2, t_final=1, dt=0.1)


def test_last_step_lands_on_t_final(fig2):
    traj = integrate(fig2, t_final=1.005, dt=0.01, record_every=10)
    assert traj.times[-1] == 1.005
    assert np.all(np.diff(traj.times) > 0)


def test_schedule_shapes():
    s = PhaseSchedule.ramp(0, 1, 10, 20)
    assert s(0) == 0 and s(15) == pytest.approx(0.5) and s(30) == 1
    pw = PhaseSchedule.piecewise([(0, 0), (1, 2), (3, -2)])
    assert pw(2) == pytest.approx(0) and pw(5) == -2
    assert PhaseSchedule.constant(0.3)(100) == 0.3
    with pytest.raises(ValueError):
        PhaseSchedule((1.0, 1.0), (0.0, 1.0))


def test_trajectory_csv(fig2, fig4):
    for p, header in ((fig2, "t,re_a1,im_a1,re_a2,im_a2,phi"),
                      (fig4, "t,re_a1,im_a1,re_a2,im_a2,re_b,im_b,phi")):
        traj = integrate(p, t_final=0.05, dt=0.01)
        buf = io.StringIO()
        traj.write_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == header
        assert len(lines) == len(traj.times) + 1
        last = [float(x) for x in lines[-1].split(",")]
        assert last[1] == traj.final[0].real and last[-1] == p.phi


def test_trajectory_invariants():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), np.zeros((2, 2)), np.zeros(2))
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 1.0]), np.zeros((3, 2)), np.zeros(2))


def test_generic_gain_has_fixed_point():
    p = replace(balanced_gain(), gamma2=-0.5)
    s = steady_state_solve(drift_two(p))
    assert math.isfinite(s.n1)
