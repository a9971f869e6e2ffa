"""Numerical Hamiltonian flows for the classical systems.

Two charts are supported and kept separate:

* Cartesian ``(q1, q2, p1, p2)`` for H_N with real coefficients. Gradients
  come from exact symbolic differentiation and are compiled to float code.
* Polar ``(rho, phi, p_rho, p_phi)`` for the curved oscillator
  H = p_rho^2 + p_phi^2 / S_k(rho)^2 + omega^2 T_k(rho)^2, where S_k and T_k
  are the curvature-dependent sine and tangent.

Mass convention follows H = p^2 (no 1/2), so q'' = -4 omega^2 q for the flat
oscillator and its period is pi/omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .classical import SystemSpec, build_angular_momentum, build_hamiltonian, solve_integral_ansatz
from .poly import PHASE_VARS, PhasePolynomial

__all__ = [
    "NonRealParameterError",
    "ConvergenceError",
    "IntegrationError",
    "DomainError",
    "TrajectoryConfig",
    "Trajectory",
    "CurvedOscillatorSpec",
    "ClosureResult",
    "compile_polynomial",
    "CartesianSystem",
    "PolarOscillator",
    "hamilton_vector_field",
    "integrate_trajectory",
    "integrate_polar",
    "curved_oscillator_hamiltonian",
    "kappa_sin",
    "kappa_tan",
    "kappa_cos",
    "closed_orbit_check",
    "detect_closure",
    "relative_drift",
    "standard_observables",
    "roundtrip_error",
]

INTEGRATORS = ("implicit-midpoint", "explicit-rk4")


class NonRealParameterError(ValueError):
    """Cartesian dynamics needs every g_n real."""


class ConvergenceError(RuntimeError):
    def __init__(self, step: int, residual: float):
        super().__init__(f"implicit stage did not converge at step {step} (residual {residual:.3e})")
        self.step = step
        self.residual = residual


class IntegrationError(FloatingPointError):
    """Non-finite state encountered."""

    def __init__(self, step: int):
        super().__init__(f"non-finite state at step {step}")
        self.step = step


class DomainError(ValueError):
    """Point outside the regular domain of the curved oscillator."""


# ---------------------------------------------------------------------------
# compiled polynomial evaluation
# ---------------------------------------------------------------------------

def compile_polynomial(poly: PhasePolynomial) -> Callable[[float, float, float, float], float]:
    """Turn a parameter-free real PhasePolynomial into a fast float function."""
    if poly.parameters():
        raise ValueError(f"unresolved parameters {sorted(poly.parameters())}")
    terms = []
    for m, coeff in poly.terms.items():
        c = coeff.constant_term()
        if c.im:
            raise NonRealParameterError("polynomial has non-real coefficients")
        factors = [repr(float(c.re))]
        factors += [v if e == 1 else f"{v}**{e}" for v, e in zip(PHASE_VARS, m) if e]
        terms.append("*".join(factors))
    src = f"def _f(q1, q2, p1, p2):\n    return {' + '.join(terms) or '0.0'}\n"
    scope: dict = {}
    exec(compile(src, "<compiled polynomial>", "exec"), scope)
    return scope["_f"]


# ---------------------------------------------------------------------------
# integrators (shared by both charts)
# ---------------------------------------------------------------------------

def _rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint_step(f, x, h, tol, max_iter, step_index):
    y = x + h * f(x)
    for _ in range(max_iter):
        y_new = x + h * f(0.5 * (x + y))
        err = float(np.max(np.abs(y_new - y)))
        y = y_new
        if err <= tol * (1.0 + float(np.max(np.abs(y)))):
            return y
    raise ConvergenceError(step_index, err)


def _integrate(f, x0, t_end, dt, method, tol, max_iter):
    if dt == 0 or not math.isfinite(dt):
        raise ValueError("dt must be finite and nonzero")
    n_steps = int(round(abs(t_end) / abs(dt)))
    states = np.empty((n_steps + 1, len(x0)))
    states[0] = x0
    x = np.asarray(x0, dtype=float)
    for i in range(1, n_steps + 1):
        try:
            with np.errstate(over="raise", invalid="raise"):
                if method == "explicit-rk4":
                    x = _rk4_step(f, x, dt)
                else:
                    x = _midpoint_step(f, x, dt, tol, max_iter, i)
        except (OverflowError, FloatingPointError) as exc:
            raise IntegrationError(i) from exc
        if not np.all(np.isfinite(x)):
            raise IntegrationError(i)
        states[i] = x
    times = np.arange(n_steps + 1) * dt
    return times, states


# ---------------------------------------------------------------------------
# Cartesian chart
# ---------------------------------------------------------------------------

@dataclass
class TrajectoryConfig:
    initial_state: Sequence[float]
    t_end: float
    dt: float
    integrator: str = "implicit-midpoint"
    observables: dict[str, PhasePolynomial] = field(default_factory=dict)
    inner_tol: float = 1e-15
    max_iter: int = 100

    def __post_init__(self):
        self.initial_state = tuple(float(x) for x in self.initial_state)
        if len(self.initial_state) != 4:
            raise ValueError("initial_state needs four entries")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= self.dt:
            raise ValueError("t_end must be at least dt")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")


class CartesianSystem:
    """Hamilton's equations for a real member of the H_N family."""

    def __init__(self, spec: SystemSpec):
        if spec.symbolic:
            raise NonRealParameterError("dynamics needs numeric coefficients")
        if not spec.is_real():
            raise NonRealParameterError(
                "complex g_n give a complex Cartesian Hamiltonian; use the polar "
                "curved-oscillator chart (PolarOscillator) for g1 = 2i*omega")
        self.spec = spec
        self.hamiltonian = spec.specialize(build_hamiltonian(SystemSpec(spec.N)))
        h = self.hamiltonian
        self._dq = [compile_polynomial(h.partial_derivative(v)) for v in ("q1", "q2")]
        self._dp = [compile_polynomial(h.partial_derivative(v)) for v in ("p1", "p2")]

    def vector_field(self, x) -> np.ndarray:
        q1, q2, p1, p2 = x
        return np.array([
            self._dp[0](q1, q2, p1, p2),
            self._dp[1](q1, q2, p1, p2),
            -self._dq[0](q1, q2, p1, p2),
            -self._dq[1](q1, q2, p1, p2),
        ])


def hamilton_vector_field(spec: SystemSpec, state) -> np.ndarray:
    """(dq1/dt, dq2/dt, dp1/dt, dp2/dt) = (dH/dp, -dH/dq) at ``state``."""
    return CartesianSystem(spec).vector_field(np.asarray(state, dtype=float))


def standard_observables(spec: SystemSpec) -> dict[str, PhasePolynomial]:
    """H, C and the solved I_N for ``spec``."""
    sym = SystemSpec(spec.N)
    return {
        "H": spec.specialize(build_hamiltonian(sym)),
        "C": build_angular_momentum(),
        "I_N": spec.specialize(solve_integral_ansatz(sym).integral),
    }


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    observables: dict[str, np.ndarray]
    columns: tuple[str, ...] = PHASE_VARS

    def drift(self, name: str) -> float:
        return relative_drift(self.observables[name])


def relative_drift(values: np.ndarray) -> float:
    """max_t |v(t) - v(0)| / |v(0)|; absolute when v(0) is exactly zero."""
    v0 = values[0]
    scale = abs(v0) if v0 != 0 else 1.0
    return float(np.max(np.abs(values - v0)) / scale)


def integrate_trajectory(cfg: TrajectoryConfig, spec: SystemSpec) -> Trajectory:
    system = CartesianSystem(spec)
    times, states = _integrate(system.vector_field, np.array(cfg.initial_state), cfg.t_end, cfg.dt,
                               cfg.integrator, cfg.inner_tol, cfg.max_iter)
    obs = {}
    for name, poly in cfg.observables.items():
        fn = compile_polynomial(spec.specialize(poly))
        obs[name] = np.array([fn(*row) for row in states])
    return Trajectory(times, states, obs)


# ---------------------------------------------------------------------------
# polar chart: curved oscillator
# ---------------------------------------------------------------------------

_SERIES_CUTOFF = 1e-6


def kappa_sin(kappa: float, x: float) -> float:
    """sin(sqrt(k) x)/sqrt(k), sinh for k < 0, x for k = 0."""
    z = kappa * x * x
    if abs(z) < _SERIES_CUTOFF:
        return x * (1 - z / 6 + z * z / 120 - z ** 3 / 5040)
    if kappa > 0:
        r = math.sqrt(kappa)
        return math.sin(r * x) / r
    r = math.sqrt(-kappa)
    return math.sinh(r * x) / r


def kappa_cos(kappa: float, x: float) -> float:
    z = kappa * x * x
    if abs(z) < _SERIES_CUTOFF:
        return 1 - z / 2 + z * z / 24 - z ** 3 / 720
    if kappa > 0:
        return math.cos(math.sqrt(kappa) * x)
    return math.cosh(math.sqrt(-kappa) * x)


def kappa_tan(kappa: float, x: float) -> float:
    z = kappa * x * x
    if abs(z) < _SERIES_CUTOFF:
        return x * (1 + z / 3 + 2 * z * z / 15 + 17 * z ** 3 / 315)
    if kappa > 0:
        r = math.sqrt(kappa)
        return math.tan(r * x) / r
    r = math.sqrt(-kappa)
    return math.tanh(r * x) / r


@dataclass(frozen=True)
class CurvedOscillatorSpec:
    kappa: float
    omega: float
    p_phi: float = 0.0


def _check_domain(spec: CurvedOscillatorSpec, rho: float):
    if spec.kappa > 0 and math.sqrt(spec.kappa) * rho >= math.pi / 2:
        raise DomainError("rho beyond the spherical singularity sqrt(kappa)*rho = pi/2")
    if rho <= 0 and spec.p_phi != 0:
        raise DomainError("rho must be positive when p_phi != 0")
    if rho < 0:
        raise DomainError("rho must be nonnegative")


def curved_oscillator_hamiltonian(spec: CurvedOscillatorSpec, rho: float, p_rho: float) -> float:
    _check_domain(spec, rho)
    s = kappa_sin(spec.kappa, rho)
    t = kappa_tan(spec.kappa, rho)
    centrifugal = spec.p_phi ** 2 / s ** 2 if spec.p_phi else 0.0
    return p_rho ** 2 + centrifugal + spec.omega ** 2 * t ** 2


class PolarOscillator:
    """Hamilton's equations in (rho, phi, p_rho, p_phi)."""

    def __init__(self, spec: CurvedOscillatorSpec):
        self.spec = spec

    def vector_field(self, x) -> np.ndarray:
        rho, _phi, p_rho, p_phi = x
        k, w = self.spec.kappa, self.spec.omega
        s = kappa_sin(k, rho)
        c = kappa_cos(k, rho)
        t = kappa_tan(k, rho)
        return np.array([
            2.0 * p_rho,
            2.0 * p_phi / s ** 2,
            2.0 * p_phi ** 2 * c / s ** 3 - 2.0 * w ** 2 * t / c ** 2,
            0.0,
        ])

    def energy(self, x) -> float:
        return curved_oscillator_hamiltonian(
            CurvedOscillatorSpec(self.spec.kappa, self.spec.omega, x[3]), x[0], x[2])


def integrate_polar(cfg: TrajectoryConfig, spec: CurvedOscillatorSpec) -> Trajectory:
    """Integrate from ``cfg.initial_state = (rho, phi, p_rho, p_phi)``."""
    x0 = _polar_initial(cfg, spec)
    system = PolarOscillator(spec)
    times, states = _integrate(system.vector_field, x0, cfg.t_end, cfg.dt, cfg.integrator,
                               cfg.inner_tol, cfg.max_iter)
    energy = np.array([system.energy(row) for row in states])
    return Trajectory(times, states, {"H": energy, "p_phi": states[:, 3].copy()},
                      columns=("rho", "phi", "p_rho", "p_phi"))


def _polar_initial(cfg: TrajectoryConfig, spec: CurvedOscillatorSpec) -> np.ndarray:
    rho, phi, p_rho, p_phi = cfg.initial_state
    if p_phi != spec.p_phi:
        raise ValueError("initial p_phi must match CurvedOscillatorSpec.p_phi")
    _check_domain(spec, rho)
    return np.array([rho, phi, p_rho, p_phi])


# ---------------------------------------------------------------------------
# closed-orbit detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosureResult:
    is_closed: bool
    period_estimate: float | None
    min_distance: float


def _hermite(x0, x1, f0, f1, h, s):
    s2, s3 = s * s, s * s * s
    return ((2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * f0
            + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * h * f1)


def _first_return(times, states, field_fn, metric, tol) -> ClosureResult:
    d = np.array([metric(s) for s in states])
    # leave the starting neighbourhood before looking for a return
    start = int(np.argmax(d > 10 * max(tol, d[1]))) if np.any(d > 10 * max(tol, d[1])) else len(d)
    best = ClosureResult(False, None, float("inf"))
    for k in range(max(start, 1), len(d) - 1):
        if not (d[k] <= d[k - 1] and d[k] <= d[k + 1]):
            continue
        dt = times[1] - times[0]
        nodes = [(k - 1, k), (k, k + 1)]
        cands = []
        for a, b in nodes:
            fa, fb = field_fn(states[a]), field_fn(states[b])

            def dist(s, a=a, b=b, fa=fa, fb=fb):
                return metric(_hermite(states[a], states[b], fa, fb, dt, s))

            r = minimize_scalar(dist, bounds=(0.0, 1.0), method="bounded",
                                options={"xatol": 1e-12})
            cands.append((r.fun, times[a] + r.x * dt))
        dmin, tmin = min(cands)
        if dmin < best.min_distance:
            best = ClosureResult(bool(dmin < tol), float(tmin), float(dmin))
        if dmin < tol:
            return best
    return ClosureResult(False, None if not best.is_closed else best.period_estimate,
                         best.min_distance)


def detect_closure(traj: Trajectory, spec, tol: float = 1e-6) -> ClosureResult:
    """First return of an already integrated trajectory (see closed_orbit_check)."""
    x0 = traj.states[0]
    if isinstance(spec, CurvedOscillatorSpec):
        field_fn = PolarOscillator(spec).vector_field

        def metric(x):
            dphi = math.remainder(x[1] - x0[1], 2 * math.pi)
            return math.sqrt((x[0] - x0[0]) ** 2 + dphi ** 2 + (x[2] - x0[2]) ** 2
                             + (x[3] - x0[3]) ** 2)
    else:
        field_fn = CartesianSystem(spec).vector_field

        def metric(x):
            return float(np.linalg.norm(np.asarray(x) - x0))

    return _first_return(traj.times, traj.states, field_fn, metric, tol)


def closed_orbit_check(cfg: TrajectoryConfig, spec, tol: float = 1e-6) -> ClosureResult:
    """First return to a ``tol``-neighbourhood of the initial phase-space point.

    ``spec`` is a :class:`CurvedOscillatorSpec` (polar chart, phi compared
    modulo 2 pi) or a real :class:`SystemSpec` (Cartesian chart). The period
    is the minimiser of the Hermite-interpolated distance near the first
    sampled return.
    """
    if isinstance(spec, CurvedOscillatorSpec):
        traj = integrate_polar(cfg, spec)
    else:
        traj = integrate_trajectory(cfg, spec)
    return detect_closure(traj, spec, tol)


def roundtrip_error(cfg: TrajectoryConfig, spec) -> float:
    """Integrate to ``t_end`` and back with ``-dt``; max-norm distance to the start.

    Both integrators are symmetric one-step maps up to the inner tolerance,
    so the round trip should return to the initial state.
    """
    if isinstance(spec, CurvedOscillatorSpec):
        f = PolarOscillator(spec).vector_field
        x0 = _polar_initial(cfg, spec)
    else:
        f = CartesianSystem(spec).vector_field
        x0 = np.array(cfg.initial_state)
    _, fwd = _integrate(f, x0, cfg.t_end, cfg.dt, cfg.integrator, cfg.inner_tol, cfg.max_iter)
    _, back = _integrate(f, fwd[-1], cfg.t_end, -cfg.dt, cfg.integrator, cfg.inner_tol,
                         cfg.max_iter)
    return float(np.max(np.abs(back[-1] - x0)))
