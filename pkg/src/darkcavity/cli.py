"""Command-line front end.

Exit codes: 0 success, 1 config error, 2 infeasible or limit exceeded
(including a singular sweep, which still writes its ``nan`` rows),
3 integration step rejected. CSV goes to ``--out`` (or stdout when absent);
summaries go to stdout, or to stderr when stdout carries the CSV.
"""
from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
import warnings
from contextlib import contextmanager

import numpy as np

from . import atoms, dark, dynamics, oracle
from .errors import (InfeasibleDesignError, OracleError, ParameterError,
                     SingularSystemError, StepSizeError)
from .params import ThreeModeParams, load_config
from .sweep import SweepSpec, phase_sweep

EXIT_OK, EXIT_CONFIG, EXIT_LIMIT, EXIT_STEP = 0, 1, 2, 3
ORACLE_TOL = {2: 1e-5, 3: 1e-4}
ORACLE_DEFAULT_CUTOFF = {2: 8, 3: 4}

_FUNCS = {"sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "tan": math.tan,
          "asin": math.asin, "acos": math.acos, "atan": math.atan,
          "arcsin": math.asin, "arccos": math.acos, "arctan": math.atan}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_number(text: str) -> float:
    """Evaluate a small arithmetic expression such as ``-0.25pi`` or
    ``asin(-1/sqrt(5))``. Only numbers, ``pi``, + - * / ** and a few
    trigonometric functions are accepted."""
    src = text.strip()
    if src.endswith("pi") and src[:-2] and src[-3].isdigit():
        src = src[:-2] + "*pi"

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported expression: {text!r}")

    try:
        return ev(ast.parse(src, mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse number {text!r}") from exc


def _number(text):
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def fmt_phase(phi: float) -> str:
    return f"{phi:.10g} rad = {phi / math.pi:.6f} pi"


def fmt_complex(z: complex) -> str:
    return f"{z.real:+.10g}{z.imag:+.10g}j"


class Abort(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


@contextmanager
def _csv_target(path):
    if path is None:
        yield sys.stdout, sys.stderr
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh, sys.stdout


def _load(args):
    if args.config is None:
        raise Abort(EXIT_CONFIG, "--config is required for this command")
    try:
        params = load_config(args.config)
    except OSError as exc:
        raise Abort(EXIT_CONFIG, f"cannot read config: {exc}") from exc
    except ParameterError as exc:
        raise Abort(EXIT_CONFIG, f"invalid config: {exc}") from exc
    if args.atoms and not isinstance(params, ThreeModeParams):
        raise Abort(EXIT_CONFIG, "--atoms given but config lacks delta_b, gamma_b, eta")
    return params


def steady_state(params):
    if isinstance(params, ThreeModeParams):
        return atoms.steady_state_closed_form_atoms(params)
    return dynamics.steady_state_closed_form(params)


def _state_lines(state) -> list:
    lines = [f"alpha1 = {fmt_complex(state.alpha1)}   n1 = {state.n1:.10g}",
             f"alpha2 = {fmt_complex(state.alpha2)}   n2 = {state.n2:.10g}"]
    if state.beta is not None:
        lines.append(f"beta   = {fmt_complex(state.beta)}   nb = {state.nb:.10g}")
    return lines


# --- subcommands -------------------------------------------------------------

def cmd_sweep(args) -> int:
    params = _load(args)
    model = "three-mode" if isinstance(params, ThreeModeParams) else "two-mode"
    try:
        spec = SweepSpec(args.phi_from, args.phi_to, args.points, model)
    except ValueError as exc:
        raise Abort(EXIT_CONFIG, str(exc)) from exc
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = phase_sweep(params, spec)
    with _csv_target(args.out) as (fh, log):
        result.write_csv(fh)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        if not result.singular:
            print(f"n1 grid minimum at phi = {fmt_phase(result.argmin('n1'))}", file=log)
            print(f"n2 grid minimum at phi = {fmt_phase(result.argmin('n2'))}", file=log)
    return EXIT_LIMIT if result.singular else EXIT_OK


def cmd_dark(args) -> int:
    params = _load(args)
    three = isinstance(params, ThreeModeParams)
    try:
        if three:
            solver = atoms.dark_phase_cavity1_atoms if args.cavity == 1 else atoms.dark_phase_cavity2_atoms
        else:
            solver = dark.dark_phase_cavity1 if args.cavity == 1 else dark.dark_phase_cavity2
        sol = solver(params)
    except ValueError as exc:
        raise Abort(EXIT_LIMIT, str(exc)) from exc
    print(f"cavity {sol.cavity} dark phase: phi = {fmt_phase(sol.phi)}")
    print(f"feasibility residual = {sol.feasibility_residual:.3e} "
          f"({'feasible' if sol.feasible else 'infeasible'})")
    try:
        state = steady_state(params.with_phi(sol.phi))
    except SingularSystemError as exc:
        print(f"steady state: {exc}")
        return EXIT_LIMIT
    for line in _state_lines(state):
        print(line)
    return EXIT_OK if sol.feasible else EXIT_LIMIT


def cmd_design(args) -> int:
    try:
        if args.atoms:
            design = atoms.design_symmetric_atoms(args.delta, args.gamma, args.lam)
        else:
            design = dark.design_symmetric(args.delta, args.gamma, args.lam)
    except InfeasibleDesignError as exc:
        raise Abort(EXIT_LIMIT, str(exc)) from exc
    except ValueError as exc:
        raise Abort(EXIT_CONFIG, str(exc)) from exc
    p = design.params
    text = json.dumps(p.to_dict(), indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        log = sys.stderr
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        log = sys.stdout
    base = p.base if args.atoms else p
    print(f"J = {base.J:.12g}" + (f", eta = {p.eta:.12g}" if args.atoms else ""), file=log)
    print(f"cavity 1 dark at phi = {fmt_phase(design.phi_dark_1)}", file=log)
    print(f"cavity 2 dark at phi = {fmt_phase(design.phi_dark_2)}", file=log)
    return EXIT_OK


def _schedule(args, params):
    if args.phase_ramp is not None:
        parts = args.phase_ramp.split(":")
        if len(parts) != 4:
            raise Abort(EXIT_CONFIG, "--phase-ramp expects phi0:phi1:t0:t1")
        try:
            phi0, phi1, t0, t1 = (parse_number(x) for x in parts)
            return dynamics.PhaseSchedule.ramp(phi0, phi1, t0, t1)
        except ValueError as exc:
            raise Abort(EXIT_CONFIG, f"bad --phase-ramp: {exc}") from exc
    phi = params.phi if args.phase_const is None else args.phase_const
    return dynamics.PhaseSchedule.constant(phi)


def cmd_integrate(args) -> int:
    params = _load(args)
    schedule = _schedule(args, params)
    initial = None
    try:
        if args.initial == "steady":
            initial = dynamics.solve_fixed_point(dynamics.drift(params.with_phi(float(schedule(0.0)))))
        traj = dynamics.integrate(params, initial, schedule, args.t_final, args.dt, args.record_every)
        target = dynamics.solve_fixed_point(dynamics.drift(params.with_phi(float(schedule(args.t_final)))))
    except StepSizeError as exc:
        raise Abort(EXIT_STEP, str(exc)) from exc
    except SingularSystemError as exc:
        raise Abort(EXIT_LIMIT, str(exc)) from exc
    except ValueError as exc:
        raise Abort(EXIT_CONFIG, str(exc)) from exc
    with _csv_target(args.out) as (fh, log):
        traj.write_csv(fh)
        dist = float(np.linalg.norm(traj.final - target))
        print(f"final-state distance to target steady state = {dist:.6e}", file=log)
    return EXIT_OK


def cmd_oracle(args) -> int:
    params = _load(args)
    modes = 3 if isinstance(params, ThreeModeParams) else 2
    cutoffs = args.cutoffs or [args.cutoff or ORACLE_DEFAULT_CUTOFF[modes]]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            results = [oracle.liouvillian_steady_state(params, c) for c in cutoffs]
        reference = np.array(steady_state(params).as_vector())
    except OracleError as exc:
        raise Abort(EXIT_LIMIT, str(exc)) from exc
    except SingularSystemError as exc:
        raise Abort(EXIT_LIMIT, str(exc)) from exc
    with _csv_target(args.out) as (fh, log):
        oracle.write_report(results, fh)
        final = results[-1]
        discrepancy = float(np.abs(final.means - reference).max())
        tol = ORACLE_TOL[modes]
        ok = discrepancy < tol
        print(f"cutoff {final.cutoff}: max |first moment - closed form| = {discrepancy:.3e} "
              f"(tolerance {tol:g}) {'PASS' if ok else 'FAIL'}", file=log)
        print(f"trace error = {final.trace_error:.3e}", file=log)
    return EXIT_OK if ok else EXIT_LIMIT


def cmd_steady_state(args) -> int:
    params = _load(args)
    if args.phi is not None:
        params = params.with_phi(args.phi)
    system = dynamics.drift(params)
    try:
        state = dynamics.steady_state_solve(system)
    except SingularSystemError as exc:
        print(str(exc))
        return EXIT_LIMIT
    stab = dynamics.stability(system)
    print(f"phi = {fmt_phase(params.phi)}")
    for line in _state_lines(state):
        print(line)
    print(f"det(M) = {fmt_complex(dynamics.determinant(system.M))}")
    print(f"max Re(eigenvalue) = {stab.max_real:.10g} ({'stable' if stab.is_stable else 'unstable'})")
    return EXIT_OK


# --- parser --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Usage errors are config errors (exit 1), not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="darkcavity",
        description="Driven two-cavity optical molecule: sweeps, dark phases, oracle checks.",
    )
    parser.add_argument("--config", default=None, help="flat JSON parameter file")
    parser.add_argument("--atoms", action="store_true", help="three-mode model with an atomic ensemble")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")

    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--atoms", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="occupations on a phase grid")
    p.add_argument("--from", dest="phi_from", type=_number, default=-math.pi)
    p.add_argument("--to", dest="phi_to", type=_number, default=math.pi)
    p.add_argument("--points", type=int, default=2001)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dark", parents=[common], help="dark phase of one cavity")
    p.add_argument("--cavity", type=int, choices=(1, 2), required=True)
    p.set_defaults(func=cmd_dark)

    p = sub.add_parser("design", parents=[common], help="symmetric parameters with both dark phases")
    p.add_argument("--delta", type=_number, required=True)
    p.add_argument("--gamma", type=_number, default=1.0)
    p.add_argument("--lambda", dest="lam", type=_number, required=True)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("integrate", parents=[common], help="time evolution under a phase program")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--phase-const", type=_number, default=None)
    g.add_argument("--phase-ramp", default=None, metavar="PHI0:PHI1:T0:T1")
    p.add_argument("--t-final", type=_number, default=40.0)
    p.add_argument("--dt", type=_number, default=0.01)
    p.add_argument("--initial", choices=("zero", "steady"), default="zero")
    p.add_argument("--record-every", type=int, default=1)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("oracle", parents=[common], help="master-equation check of the mean field")
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--cutoffs", type=lambda s: [int(x) for x in s.split(",")], default=None,
                   help="comma-separated cutoffs for a truncation sweep")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("steady-state", parents=[common], help="fixed point, determinant, stability")
    p.add_argument("--phi", type=_number, default=None)
    p.set_defaults(func=cmd_steady_state)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Abort as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
