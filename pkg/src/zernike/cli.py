"""Command-line entry point: ``zernike verify | solve-ansatz | spectrum | simulate``.

Exit codes: 0 every check passed, 2 an identity or tolerance check failed,
64 bad arguments or configuration, 70 unexpected internal failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from .classical import (
    SystemSpec,
    build_angular_momentum,
    build_hamiltonian,
    check_dependence_relation,
    independence_survey,
    parse_gaussian,
    solve_integral_ansatz,
)
from .dynamics import (
    ConvergenceError,
    CurvedOscillatorSpec,
    DomainError,
    IntegrationError,
    NonRealParameterError,
    TrajectoryConfig,
    detect_closure,
    integrate_polar,
    integrate_trajectory,
    standard_observables,
)
from .gaussian import GaussianRational, as_gaussian
from .poly import poisson_bracket
from .spectra import (
    REAL_NAMES,
    IdentityError,
    NoSpectrumError,
    build_ladder_basis,
    build_structure_operator,
    deformed_oscillator,
    solve_spectrum,
    to_real_parameters,
)
from .spectra import ClosureError as LadderClosureError
from .symmetry import ClosureError, build_generators, verify_higgs_closure
from .weyl import (
    OP_NAMES,
    build_quantum_hamiltonian,
    build_quantum_integral,
    commutator,
    quantum_angular_momentum,
    verify_quantum_relation,
)

EXIT_OK = 0
EXIT_IDENTITY = 2
EXIT_USAGE = 64
EXIT_INTERNAL = 70

MAX_RESIDUAL_CHARS = 4000
CARTESIAN_COLUMNS = ("t", "q1", "q2", "p1", "p2", "H", "C", "I_N")
POLAR_COLUMNS = ("t", "rho", "phi", "p_rho", "p_phi", "H", "C")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# reports and files
# ---------------------------------------------------------------------------

class Report:
    def __init__(self, command: str, seed: int, target: str | None = None):
        self.command = command
        self.target = target
        self.seed = seed
        self.spec = {"N": None, "gamma": "symbolic"}
        self.checks: list[dict] = []
        self.artifacts: list[str] = []
        self.result: dict = {}
        self.error: str | None = None
        self._start = time.perf_counter()

    def set_spec(self, spec: SystemSpec):
        gamma = "symbolic" if spec.symbolic else [str(g) for g in spec.gamma]
        self.spec = {"N": spec.N, "gamma": gamma}

    def check(self, name: str, ok: bool, residual=None, skipped: bool = False) -> bool:
        entry = {"name": name, "status": "skipped" if skipped else ("pass" if ok else "fail")}
        if not ok and not skipped:
            text = residual if isinstance(residual, str) else (
                residual.to_text() if residual is not None else "check failed")
            if len(text) > MAX_RESIDUAL_CHARS:
                text = text[:MAX_RESIDUAL_CHARS] + " ..."
            entry["residual_text"] = text
        self.checks.append(entry)
        return ok

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def as_dict(self, exit_code: int) -> dict:
        out = {
            "command": self.command,
            "spec": self.spec,
            "checks": self.checks,
            "artifacts": self.artifacts,
            "wall_time": time.perf_counter() - self._start,
            "seed": self.seed,
            "exit_code": exit_code,
            "result": self.result,
        }
        if self.target is not None:
            out["target"] = self.target
        if self.error is not None:
            out["error"] = self.error
        return out


def write_atomic(path: str | os.PathLike, text: str) -> str:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return str(path)


def _say(args, *lines):
    if not args.quiet:
        for line in lines:
            print(line)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _parse_list(text: str | None) -> list[GaussianRational] | None:
    if text is None or text == "symbolic":
        return None
    out = []
    for item in text.split(","):
        item = item.strip()
        try:
            out.append(parse_gaussian(item))
        except (ValueError, TypeError, SyntaxError) as exc:
            raise UsageError(f"not an exact rational: {item!r} (use p/q, floats are rejected)") from exc
    return out


def _system_spec(N: int, gamma_text: str | None, max_n: int) -> SystemSpec:
    if not 1 <= N <= max_n:
        raise UsageError(f"N must satisfy 1 <= N <= {max_n}, got {N}")
    gamma = _parse_list(gamma_text)
    if gamma is not None and len(gamma) != N:
        raise UsageError(f"expected {N} gamma values, got {len(gamma)}")
    return SystemSpec(N, None if gamma is None else tuple(gamma))


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_classical(args, report: Report):
    spec = _system_spec(args.N, args.gamma, 5)
    report.set_spec(spec)
    sym = SystemSpec(spec.N)
    sol = solve_integral_ansatz(sym)
    H = spec.specialize(build_hamiltonian(sym))
    C = build_angular_momentum()
    I_N = spec.specialize(sol.integral)

    r = poisson_bracket(H, C)
    report.check("{H,C}=0", r.is_zero(), r)
    r = poisson_bracket(H, I_N)
    report.check("{H,I}=0", r.is_zero(), r)
    holds, r = check_dependence_relation(spec, sol)
    report.check("H=I+I'+sum (-1)^k g_2k C^2k", holds, r)
    higgs = None
    try:
        gens = build_generators(spec, sol)
        report.check("{L1,L3}=-L2", True)
        closure = verify_higgs_closure(spec, gens)
        higgs = closure.higgs_order
        report.check("{L2,L3}=-sum n Phi_n (2L1)^(2n-1)", closure.holds, closure.residual)
    except ClosureError as exc:
        report.check("{L1,L3}=-L2", False, str(exc))
    ranks = independence_survey([H, C, I_N], spec, n_points=10, seed=args.seed)
    good = sum(r == 3 for r in ranks)
    report.check("jacobian rank 3 at >= 9/10 points", good >= 9, f"rank 3 at {good}/10 points")
    report.result = {
        "N": spec.N,
        "brackets_checked": [c["name"] for c in report.checks],
        "residual_zero": not report.failed,
        "higgs_order": None if higgs is None or not isinstance(higgs, int) else higgs,
        "jacobian_ranks": ranks,
    }


def _verify_quantum(args, report: Report):
    spec = _system_spec(args.N, args.gamma, 4)
    report.set_spec(spec)
    H = build_quantum_hamiltonian(spec)
    C = quantum_angular_momentum()
    I_N = build_quantum_integral(spec)
    r = commutator(H, C)
    report.check("[H,C]=0", r.is_zero(), r)
    r = commutator(H, I_N)
    report.check("[H,I]=0", r.is_zero(), r)
    holds, r = verify_quantum_relation(spec)
    report.check("H=I+I'-4 g4 C^2+g4 C^4", holds, r)
    try:
        basis = build_ladder_basis(spec)
        report.check("[K,K+-]=+-K+-", True)
    except LadderClosureError as exc:
        report.check("[K,K+-]=+-K+-", False, str(exc))
        basis = None
    names = ("K+K-=Phi1 Phi2", "[K-,K+]=Phi(K+1)-Phi(K)", "deformed oscillator relations")
    if basis is None:
        for name in names:
            report.check(name, True, skipped=True)
    else:
        try:
            so = build_structure_operator(spec, basis)
            report.check(names[0], True)
            report.check(names[1], True)
            deformed_oscillator(spec, basis, so)
            report.check(names[2], True)
        except IdentityError as exc:
            report.check(str(exc), False, exc.residual)
    report.result = {
        "N": spec.N,
        "identities_checked": [c["name"] for c in report.checks],
        "residual_zero": not report.failed,
    }


def cmd_verify(args, report: Report):
    report.target = args.target
    if args.target == "classical":
        _verify_classical(args, report)
    else:
        _verify_quantum(args, report)
    for c in report.checks:
        _say(args, f"{c['status'].upper():7s} {c['name']}")


# ---------------------------------------------------------------------------
# solve-ansatz
# ---------------------------------------------------------------------------

def cmd_solve_ansatz(args, report: Report):
    spec = _system_spec(args.N, None, 5)
    report.set_spec(spec)
    sol = solve_integral_ansatz(spec)
    names = OP_NAMES if args.case == "upper" else None
    h = build_hamiltonian(spec)
    r = poisson_bracket(h, sol.integral)
    report.check("{H,I}=0", r.is_zero(), r)
    q_text = {f"Q^({n - j},{j})": q.to_text(names)
              for (n, j), q in sorted(sol.q_table.items())}
    integral = sol.integral.to_text(names)
    report.result = {
        "N": spec.N,
        "q_polynomials": q_text,
        "integral": integral,
        "residual_is_zero": r.is_zero(),
        "free_parameters": sol.free_parameters,
    }
    lines = [f"{k} = {v}" for k, v in q_text.items()] + [f"I_{spec.N} = {integral}"]
    if args.out:
        report.artifacts.append(write_atomic(args.out, integral + "\n"))
    if args.quiet:
        return
    if args.integral_only:
        print(integral)
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def _real_point(N: int, values: list[GaussianRational] | None) -> dict | None:
    if values is None:
        return None
    need = min(N, 4)
    if len(values) != need:
        raise UsageError(f"expected {need} values for ({', '.join(REAL_NAMES[:need])})")
    for v in values:
        if v.im:
            raise UsageError("beta, alpha, mu, nu must be real rationals")
    return {name: v for name, v in zip(REAL_NAMES, values)}


def cmd_spectrum(args, report: Report):
    if not 1 <= args.N <= 4:
        raise UsageError(f"N must satisfy 1 <= N <= 4, got {args.N}")
    if args.n_max < 0:
        raise UsageError("n-max must be nonnegative")
    point = _real_point(args.N, _parse_list(args.params))
    spec = SystemSpec(args.N)
    report.set_spec(spec)
    report.result = {"parameters": "symbolic" if point is None else
                     {k: str(v) for k, v in point.items()}, "types": []}
    try:
        families = solve_spectrum(spec)
    except NoSpectrumError as exc:
        report.check("spectrum families", False, str(exc))
        return
    types = []
    for fam in families:
        real = to_real_parameters(fam, args.N)
        entry = {"label": fam.label, "factor_assignment": list(fam.factor_assignment),
                 "interior_nondegenerate": fam.interior_nondegenerate,
                 "energy_gamma": fam.E_of_n.to_text()}
        if point is not None:
            try:
                real = real.substitute(point)
            except ZeroDivisionError:
                report.check(f"type {fam.label} regular", True, skipped=True)
                continue
        entry["u"] = real.u_of_n.to_text()
        entry["energy_polynomial"] = real.E_of_n.to_text()
        levels = [real.E_of_n.substitute({"n": n}) for n in range(args.n_max + 1)]
        entry["first_k_levels"] = [lv.to_text() for lv in levels]
        imaginary = real.E_of_n.num.has_imaginary_coefficients() or \
            real.E_of_n.den.has_imaginary_coefficients()
        report.check(f"type {fam.label} energy real", not imaginary, real.E_of_n.to_text())
        types.append(entry)
    report.result["types"] = types
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n"] + [f"E_{t['label']}" for t in types])
        for n in range(args.n_max + 1):
            w.writerow([n] + [t["first_k_levels"][n] for t in types])
        report.artifacts.append(write_atomic(args.csv, buf.getvalue()))
    for t in types:
        _say(args, f"type {t['label']}: u(n) = {t['u']}",
             f"type {t['label']}: E(n) = {t['energy_polynomial']}",
             f"type {t['label']}: levels = {', '.join(t['first_k_levels'])}")


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {"chart", "N", "gamma", "kappa", "omega", "initial_state", "t_end", "dt",
                "integrator", "inner_tol", "max_iter", "closure_tol", "output_every",
                "drift_tolerance", "csv", "summary"}


def _exact_number(v):
    if isinstance(v, bool):
        raise UsageError(f"not a number: {v!r}")
    if isinstance(v, float):
        return Fraction(repr(v))
    if isinstance(v, (int, str)):
        try:
            return parse_gaussian(str(v))
        except (ValueError, TypeError, SyntaxError) as exc:
            raise UsageError(f"not an exact number: {v!r}") from exc
    raise UsageError(f"not a number: {v!r}")


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key in ("initial_state", "t_end", "dt"):
        if key not in cfg:
            raise UsageError(f"config is missing {key!r}")
    return cfg


def _trajectory_config(cfg: dict) -> TrajectoryConfig:
    try:
        return TrajectoryConfig(
            initial_state=cfg["initial_state"], t_end=float(cfg["t_end"]), dt=float(cfg["dt"]),
            integrator=cfg.get("integrator", "implicit-midpoint"),
            inner_tol=float(cfg.get("inner_tol", 1e-15)), max_iter=int(cfg.get("max_iter", 100)))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid trajectory settings: {exc}") from exc


def _polar_spec(cfg: dict, p_phi: float) -> CurvedOscillatorSpec:
    if "kappa" in cfg or "omega" in cfg:
        if "gamma" in cfg:
            raise UsageError("give either kappa/omega or gamma for the polar chart")
        return CurvedOscillatorSpec(float(cfg.get("kappa", 0.0)), float(cfg["omega"]), p_phi)
    if cfg.get("N") != 2 or "gamma" not in cfg:
        raise UsageError("polar chart needs kappa and omega, or N=2 with gamma = [2i*omega, -kappa]")
    if len(cfg["gamma"]) != 2:
        raise UsageError("N=2 needs two gamma values")
    g1, g2 = (as_gaussian(_exact_number(v)) for v in cfg["gamma"])
    if g1.re or g2.im:
        raise UsageError("polar chart needs g1 purely imaginary and g2 real")
    return CurvedOscillatorSpec(-float(g2.re), float(g1.im) / 2, p_phi)


def cmd_simulate(args, report: Report):
    cfg = _load_config(args.config)
    tcfg = _trajectory_config(cfg)
    chart = cfg.get("chart", "cartesian")
    stem = Path(args.config).with_suffix("")
    csv_path = cfg.get("csv", f"{stem}.csv")
    summary_path = cfg.get("summary", f"{stem}.summary.json")
    every = int(cfg.get("output_every", 1))
    if every < 1:
        raise UsageError("output_every must be >= 1")
    closure_tol = float(cfg.get("closure_tol", 1e-6))

    if chart == "polar":
        spec = _polar_spec(cfg, tcfg.initial_state[3])
        report.spec = {"N": 2 if "gamma" in cfg else None,
                       "gamma": [str(x) for x in cfg.get("gamma", [])]}
        try:
            traj = integrate_polar(tcfg, spec)
        except DomainError as exc:
            raise UsageError(str(exc)) from exc
        energy, ang = traj.observables["H"], traj.observables["p_phi"]
        rows = ((t, *s, h, c) for t, s, h, c in zip(traj.times, traj.states, energy, ang))
        columns = POLAR_COLUMNS
        drifts = {"drift_H": traj.drift("H"), "drift_C": traj.drift("p_phi"), "drift_I": None}
    elif chart == "cartesian":
        if "N" not in cfg or "gamma" not in cfg:
            raise UsageError("cartesian chart needs N and gamma")
        try:
            spec = SystemSpec(int(cfg["N"]), tuple(_exact_number(v) for v in cfg["gamma"]))
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
        report.set_spec(spec)
        if not spec.is_real():
            raise UsageError("complex gamma: Cartesian trajectories need real coefficients; "
                             "use chart='polar' with N=2, gamma=[2i*omega, -kappa] for the "
                             "curved oscillator")
        tcfg.observables = standard_observables(spec)
        traj = integrate_trajectory(tcfg, spec)
        obs = traj.observables
        rows = ((t, *s, h, c, i) for t, s, h, c, i in
                zip(traj.times, traj.states, obs["H"], obs["C"], obs["I_N"]))
        columns = CARTESIAN_COLUMNS
        drifts = {"drift_H": traj.drift("H"), "drift_C": traj.drift("C"),
                  "drift_I": traj.drift("I_N")}
    else:
        raise UsageError(f"chart must be 'cartesian' or 'polar', got {chart!r}")

    closure = detect_closure(traj, spec, closure_tol)
    summary = dict(drifts)
    summary.update({
        "closed": closure.is_closed,
        "period": closure.period_estimate,
        "min_return_distance": None if closure.min_distance == float("inf") else closure.min_distance,
        "chart": chart,
        "steps": len(traj.times) - 1,
    })
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for k, row in enumerate(rows):
        if k % every == 0 or k == len(traj.times) - 1:
            w.writerow([repr(float(x)) for x in row])
    report.artifacts.append(write_atomic(csv_path, buf.getvalue()))
    report.artifacts.append(write_atomic(summary_path, json.dumps(summary, indent=2) + "\n"))
    report.check("integration finite", True)
    tol = cfg.get("drift_tolerance")
    for key in ("drift_H", "drift_C", "drift_I"):
        if drifts[key] is None:
            continue
        if tol is None:
            report.check(f"{key} < tolerance", True, skipped=True)
        else:
            report.check(f"{key} < {tol}", drifts[key] < float(tol), f"{key} = {drifts[key]:.3e}")
    report.result = summary
    _say(args, *(f"{k}: {v}" for k, v in summary.items()))


# ---------------------------------------------------------------------------
# parser and main
# ---------------------------------------------------------------------------

def _add_globals(p: argparse.ArgumentParser, default):
    def seed(text):
        v = int(text)
        if not 0 <= v < 2 ** 64:
            raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
        return v

    p.add_argument("--json", metavar="PATH", default=default(None),
                   help="write a machine-readable run report")
    p.add_argument("--seed", type=seed, default=default(0), help="seed for sampled checks")
    p.add_argument("--quiet", action="store_true", default=default(False),
                   help="suppress human-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zernike", description=__doc__.splitlines()[0])
    _add_globals(parser, lambda v: v)
    common = _Parser(add_help=False)
    _add_globals(common, lambda v: argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="run an identity suite")
    p.add_argument("target", choices=("classical", "quantum"))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--gamma", help="comma-separated p/q values, or 'symbolic' (default)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve-ansatz", parents=[common], help="derive I_N from the ansatz")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--case", choices=("lower", "upper"), default="lower",
                   help="spelling of q1..p2 in the printed text")
    p.add_argument("--integral-only", action="store_true", help="print only I_N")
    p.add_argument("--out", metavar="PATH", help="write I_N in canonical text")
    p.set_defaults(func=cmd_solve_ansatz)

    p = sub.add_parser("spectrum", parents=[common], help="quantum energy spectra")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--params", help="comma-separated p/q for beta,alpha,mu,nu (first N); "
                                    "omit for symbolic")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--csv", metavar="PATH", help="write E(n) for n = 0..n_max")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", parents=[common], help="integrate a trajectory")
    p.add_argument("config", help="JSON config mirroring TrajectoryConfig")
    p.set_defaults(func=cmd_simulate)
    return parser


def _emit(args, report: Report, code: int) -> int:
    path = getattr(args, "json", None)
    if path:
        try:
            write_atomic(path, json.dumps(report.as_dict(code), indent=2) + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_INTERNAL
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = Report(args.command, args.seed)
    try:
        args.func(args, report)
    except UsageError as exc:
        report.error = str(exc)
        print(f"usage error: {exc}", file=sys.stderr)
        return _emit(args, report, EXIT_USAGE)
    except (NonRealParameterError, DomainError) as exc:
        report.error = str(exc)
        print(f"error: {exc}", file=sys.stderr)
        return _emit(args, report, EXIT_USAGE)
    except (ConvergenceError, IntegrationError) as exc:
        report.error = str(exc)
        report.check("integration finite", False, str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return _emit(args, report, EXIT_INTERNAL)
    except Exception as exc:  # noqa: BLE001 - contract maps anything else to 70
        report.error = f"{type(exc).__name__}: {exc}"
        print(f"internal error: {report.error}", file=sys.stderr)
        return _emit(args, report, EXIT_INTERNAL)
    code = EXIT_IDENTITY if report.failed else EXIT_OK
    return _emit(args, report, code)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
