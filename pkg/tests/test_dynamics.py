import math

import numpy as np
import pytest

from zernike.classical import SystemSpec, build_hamiltonian
from zernike.dynamics import (
    CartesianSystem,
    ConvergenceError,
    CurvedOscillatorSpec,
    DomainError,
    IntegrationError,
    NonRealParameterError,
    PolarOscillator,
    TrajectoryConfig,
    closed_orbit_check,
    compile_polynomial,
    curved_oscillator_hamiltonian,
    hamilton_vector_field,
    integrate_polar,
    integrate_trajectory,
    kappa_cos,
    kappa_sin,
    kappa_tan,
    roundtrip_error,
    standard_observables,
)

REAL_SPEC = SystemSpec(3, ("1/10", "1/100", "1/1000"))
STATE = (0.3, 0.1, 0.2, -0.1)


def test_vector_field_matches_finite_differences():
    spec = REAL_SPEC
    H = compile_polynomial(spec.specialize(build_hamiltonian(SystemSpec(3))))
    x = np.array([0.4, -0.3, 0.7, 0.2])
    h = 1e-6
    grad = []
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        grad.append((H(*(x + e)) - H(*(x - e))) / (2 * h))
    expect = np.array([grad[2], grad[3], -grad[0], -grad[1]])
    npt_close(hamilton_vector_field(spec, x), expect, 1e-8)


def npt_close(a, b, tol):
    assert np.max(np.abs(np.asarray(a) - np.asarray(b))) < tol


def test_complex_gamma_refused():
    with pytest.raises(NonRealParameterError):
        CartesianSystem(SystemSpec(2, ("2*i", "-1")))
    with pytest.raises(NonRealParameterError):
        CartesianSystem(SystemSpec(2))


def test_config_validation():
    with pytest.raises(ValueError):
        TrajectoryConfig(STATE, 1.0, 0.0)
    with pytest.raises(ValueError):
        TrajectoryConfig(STATE, 1e-4, 1e-3)
    with pytest.raises(ValueError):
        TrajectoryConfig(STATE[:3], 1.0, 1e-3)
    with pytest.raises(ValueError):
        TrajectoryConfig(STATE, 1.0, 1e-3, integrator="euler")


def test_free_motion_energy_exact():
    spec = SystemSpec(1, (0,))
    cfg = TrajectoryConfig(STATE, 1.0, 1e-3, observables=standard_observables(spec))
    traj = integrate_trajectory(cfg, spec)
    assert traj.drift("H") == 0.0
    npt_close(traj.states[-1][:2], np.array(STATE[:2]) + 2 * np.array(STATE[2:]), 1e-12)


@pytest.mark.parametrize("integrator", ["implicit-midpoint", "explicit-rk4"])
def test_short_drift(integrator):
    cfg = TrajectoryConfig(STATE, 10.0, 1e-3, integrator=integrator,
                           observables=standard_observables(REAL_SPEC))
    traj = integrate_trajectory(cfg, REAL_SPEC)
    for name in ("H", "C", "I_N"):
        assert traj.drift(name) < 1e-9


def test_midpoint_second_order():
    errs = []
    ref = integrate_trajectory(TrajectoryConfig(STATE, 1.0, 1e-4, integrator="explicit-rk4"),
                               REAL_SPEC).states[-1]
    for dt in (1e-2, 5e-3):
        end = integrate_trajectory(TrajectoryConfig(STATE, 1.0, dt), REAL_SPEC).states[-1]
        errs.append(np.max(np.abs(end - ref)))
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_roundtrip():
    assert roundtrip_error(TrajectoryConfig(STATE, 5.0, 1e-3), REAL_SPEC) < 1e-8
    polar = CurvedOscillatorSpec(0.5, 1.0, 0.3)
    assert roundtrip_error(TrajectoryConfig((0.6, 0.0, 0.1, 0.3), 5.0, 1e-3), polar) < 1e-8


def test_convergence_error_reports_step():
    cfg = TrajectoryConfig(STATE, 1.0, 1e-3, max_iter=1)
    with pytest.raises(ConvergenceError) as info:
        integrate_trajectory(cfg, REAL_SPEC)
    assert info.value.step == 1


def test_blowup_detected():
    cfg = TrajectoryConfig((3, 3, 3, 3), 10.0, 1e-2, integrator="explicit-rk4")
    with pytest.raises(IntegrationError):
        integrate_trajectory(cfg, SystemSpec(3, (1, 1, 1)))


@pytest.mark.parametrize("x", [0.1, 0.7, 1.3])
def test_kappa_continuity(x):
    for fn in (kappa_sin, kappa_tan, kappa_cos):
        for k in (1e-12, -1e-12):
            assert abs(fn(k, x) - fn(0.0, x)) < 1e-10


def test_kappa_kernels_closed_forms():
    assert kappa_sin(4.0, 0.3) == pytest.approx(math.sin(0.6) / 2, rel=1e-14)
    assert kappa_tan(-4.0, 0.3) == pytest.approx(math.tanh(0.6) / 2, rel=1e-14)
    assert kappa_cos(-1.0, 0.5) == pytest.approx(math.cosh(0.5), rel=1e-14)
    # series branch agrees with the closed form near the switch
    x = 0.01
    k = 0.99e-6 / x ** 2
    assert kappa_tan(k, x) == pytest.approx(math.tan(math.sqrt(k) * x) / math.sqrt(k), rel=1e-14)


def test_domain_errors():
    with pytest.raises(DomainError):
        curved_oscillator_hamiltonian(CurvedOscillatorSpec(1.0, 1.0), math.pi / 2, 0.0)
    with pytest.raises(DomainError):
        curved_oscillator_hamiltonian(CurvedOscillatorSpec(0.0, 1.0, 0.5), 0.0, 0.0)
    assert curved_oscillator_hamiltonian(CurvedOscillatorSpec(0.0, 1.0, 0.0), 0.0, 1.0) == 1.0


def test_polar_matches_flat_cartesian_energy():
    # kappa = 0: H = p_rho^2 + p_phi^2/rho^2 + omega^2 rho^2
    spec = CurvedOscillatorSpec(0.0, 1.5, 0.2)
    assert curved_oscillator_hamiltonian(spec, 0.5, 0.3) == pytest.approx(
        0.09 + 0.04 / 0.25 + 2.25 * 0.25)


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
def test_flat_period(omega):
    spec = CurvedOscillatorSpec(0.0, omega, 0.2)
    cfg = TrajectoryConfig((0.5, 0.0, 0.0, 0.2), 1.5 * math.pi / omega, 1e-3, integrator="explicit-rk4")
    res = closed_orbit_check(cfg, spec)
    assert res.is_closed
    assert res.period_estimate == pytest.approx(math.pi / omega, rel=1e-4)


@pytest.mark.parametrize("kappa", [1.0, -0.5])
def test_curved_orbits_close(kappa):
    spec = CurvedOscillatorSpec(kappa, 1.0, 0.2)
    cfg = TrajectoryConfig((0.5, 0.0, 0.0, 0.2), 6.0, 1e-3, integrator="explicit-rk4")
    assert closed_orbit_check(cfg, spec).is_closed


def test_polar_energy_conserved():
    spec = CurvedOscillatorSpec(1.0, 1.0, 0.2)
    coarse = integrate_polar(TrajectoryConfig((0.5, 0.0, 0.1, 0.2), 10.0, 2e-3), spec)
    fine = integrate_polar(TrajectoryConfig((0.5, 0.0, 0.1, 0.2), 10.0, 1e-3), spec)
    # bounded O(dt^2) energy error for the midpoint rule
    assert fine.drift("H") < 1e-6
    assert 3.0 < coarse.drift("H") / fine.drift("H") < 5.0
    assert fine.drift("p_phi") == 0.0
    rk4 = integrate_polar(TrajectoryConfig((0.5, 0.0, 0.1, 0.2), 10.0, 1e-3,
                                           integrator="explicit-rk4"), spec)
    assert rk4.drift("H") < 1e-10


def test_polar_rejects_inconsistent_p_phi():
    with pytest.raises(ValueError):
        integrate_polar(TrajectoryConfig((0.5, 0.0, 0.0, 0.1), 1.0, 1e-3),
                        CurvedOscillatorSpec(0.0, 1.0, 0.2))


def test_unbounded_cartesian_not_closed():
    spec = SystemSpec(4, ("1/10", "1/100", "1/100", "1/1000"))
    res = closed_orbit_check(TrajectoryConfig(STATE, 10.0, 1e-3), spec)
    assert not res.is_closed


def test_polar_vector_field_is_hamiltonian():
    spec = CurvedOscillatorSpec(0.7, 1.2, 0.3)
    x = np.array([0.4, 0.1, 0.2, 0.3])
    f = PolarOscillator(spec).vector_field(x)
    h = 1e-6
    dH_drho = (curved_oscillator_hamiltonian(spec, x[0] + h, x[2])
               - curved_oscillator_hamiltonian(spec, x[0] - h, x[2])) / (2 * h)
    dH_dp = (curved_oscillator_hamiltonian(spec, x[0], x[2] + h)
             - curved_oscillator_hamiltonian(spec, x[0], x[2] - h)) / (2 * h)
    assert f[0] == pytest.approx(dH_dp, rel=1e-7)
    assert f[2] == pytest.approx(-dH_drho, rel=1e-7)


@pytest.mark.parametrize("kappa", [1.0, 0.4, -0.5])
def test_curved_period_energy_dependence(kappa):
    """Closed-form oracle: period pi / sqrt(omega^2 + kappa E) on the curved surfaces."""
    spec = CurvedOscillatorSpec(kappa, 1.0, 0.2)
    E = curved_oscillator_hamiltonian(spec, 0.5, 0.0)
    cfg = TrajectoryConfig((0.5, 0.0, 0.0, 0.2), 6.0, 1e-3, integrator="explicit-rk4")
    res = closed_orbit_check(cfg, spec)
    assert res.is_closed
    assert res.period_estimate == pytest.approx(math.pi / math.sqrt(1.0 + kappa * E), rel=1e-6)
