"""Command-line front end.

Every subcommand prints ``key=value`` lines, then a ``---`` separator and a
JSON block with the full report.  Exit codes: 0 success, 2 the spec does not
annihilate the matrix, 3 quadrature failure, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .annihilator import (
    AnnihilatorSpec,
    RootFindingError,
    build_q,
    characteristic_polynomial,
    cofactor,
    companion,
    spec_from_matrix,
    verify_annihilates,
)
from .hermite import (
    hermite_interpolant,
    parse_function,
    taylor_coeffs_closed_form,
    taylor_coeffs_series,
)
from .io import FormatError, matrix_to_json, read_matrix, read_spec, write_json, write_matrix
from .matfun import annihilation_bound, apply_function, mat_poly_eval, spectral_decomposition
from .odekernel import IVProblem, exppoly_derivative, exppoly_eval, parse_forcing, solve_ivp
from .poly import PowerSeries, poly_derivative, poly_eval, series_mul, taylor_shift
from .quadrature import QuadratureError

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_ANNIHILATION = 2
EXIT_QUADRATURE = 3
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class NonFiniteError(ArithmeticError):
    pass


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{fmt_float(z.real)},{fmt_float(z.imag)}"


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _all_finite(value: Any) -> bool:
    if isinstance(value, float):
        return math.isfinite(value)
    if isinstance(value, dict):
        return all(_all_finite(v) for v in value.values())
    if isinstance(value, (list, tuple)):
        return all(_all_finite(v) for v in value)
    return True


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    annihilation_residual: float = 0.0
    worst_invariant_deviation: float = 0.0
    timing_ms: float = 0.0
    summary: list[tuple[str, str]] = field(default_factory=list)

    def add(self, key: str, value: Any) -> None:
        if isinstance(value, complex):
            text = fmt_complex(value)
        elif isinstance(value, float):
            text = fmt_float(value)
        else:
            text = str(value)
        self.summary.append((key, text))

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": {
                "annihilation_residual": float(self.annihilation_residual),
                "worst_invariant_deviation": float(self.worst_invariant_deviation),
                "timing_ms": float(self.timing_ms),
            },
        }

    def render(self) -> str:
        data = self.to_json()
        if not _all_finite(data):
            raise NonFiniteError("report contains non-finite numbers")
        lines = [f"command={self.command}"]
        lines += [f"{k}={v}" for k, v in self.summary]
        lines += [
            f"annihilation_residual={fmt_float(self.annihilation_residual)}",
            f"worst_invariant_deviation={fmt_float(self.worst_invariant_deviation)}",
            f"timing_ms={fmt_float(self.timing_ms)}",
            "---",
            json.dumps(data, indent=1, allow_nan=False),
        ]
        return "\n".join(lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _complex_list(text: str) -> list[complex]:
    try:
        return [complex(s.strip()) for s in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse complex list {text!r}") from exc


def _load_spec(args, A: np.ndarray | None = None) -> AnnihilatorSpec:
    if getattr(args, "auto_spec", False):
        return spec_from_matrix(A, args.cluster_tol)
    if not args.spec:
        raise UsageError("an explicit --spec file is required (or pass --auto-spec)")
    return read_spec(args.spec)


def _interpolation_deviation(f, spec: AnnihilatorSpec) -> float:
    """Worst relative miss of ``P^(j)(a_p) = f^(j)(a_p)`` over the spec."""
    interp = hermite_interpolant(f, spec)
    worst = 0.0
    for a, alpha in spec.roots:
        P = interp.expanded
        for j in range(alpha + 1):
            if j:
                P = poly_derivative(P)
            target = f.derivative_at(j, a)
            worst = max(worst, abs(poly_eval(P, a) - target) / (1.0 + abs(target)))
    return worst


def _annihilation_failure(report: RunReport, A: np.ndarray, spec: AnnihilatorSpec) -> int:
    bound = annihilation_bound(A, spec)
    report.add("status", "annihilation_failure")
    report.add("residual_bound", bound)
    report.outputs = {"residual_bound": bound}
    sys.stdout.write(report.render())
    print(
        f"error: spec does not annihilate the matrix (|Q(A)|_F = {report.annihilation_residual:.3e} "
        f"> {bound:.3e})",
        file=sys.stderr,
    )
    return EXIT_ANNIHILATION


def cmd_funm(args, selector: str | None = None) -> int:
    start = time.perf_counter()
    selector = selector or args.function
    f = parse_function(selector)
    A = read_matrix(args.matrix)
    spec = _load_spec(args, A)
    report = RunReport(args.command)
    report.inputs = {"matrix": str(args.matrix), "spec": spec.to_json(), "function": selector}
    report.add("n", A.shape[0])
    report.add("function", selector)
    report.add("k", spec.k)
    report.add("d", spec.d)
    report.annihilation_residual = verify_annihilates(A, spec)
    if not report.annihilation_residual <= annihilation_bound(A, spec):
        report.timing_ms = 1e3 * (time.perf_counter() - start)
        return _annihilation_failure(report, A, spec)

    F = apply_function(f, A, spec, check=False)
    report.worst_invariant_deviation = _interpolation_deviation(f, spec)
    report.timing_ms = 1e3 * (time.perf_counter() - start)
    report.outputs = {"matrix": matrix_to_json(F)}
    if args.out:
        meta = {
            "function": selector,
            "spec": spec.to_json(),
            "annihilation_residual": report.annihilation_residual,
            "worst_invariant_deviation": report.worst_invariant_deviation,
        }
        write_matrix(args.out, F, meta)
        report.add("out", args.out)
    sys.stdout.write(report.render())
    return EXIT_OK


def cmd_expm(args) -> int:
    return cmd_funm(args, selector=f"exp:t={args.t!r}")


def cmd_spectral(args) -> int:
    start = time.perf_counter()
    A = read_matrix(args.matrix)
    spec = _load_spec(args, A)
    report = RunReport("spectral")
    report.inputs = {"matrix": str(args.matrix), "spec": spec.to_json()}
    report.add("n", A.shape[0])
    report.add("k", spec.k)
    report.annihilation_residual = verify_annihilates(A, spec)
    if not report.annihilation_residual <= annihilation_bound(A, spec):
        report.timing_ms = 1e3 * (time.perf_counter() - start)
        return _annihilation_failure(report, A, spec)

    dec = spectral_decomposition(A, spec, check=False)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {"spec": spec.to_json(), "annihilation_residual": dec.annihilation_residual}
    files = []
    for p, (E, Np) in enumerate(zip(dec.projectors, dec.nilpotents)):
        for name, M in ((f"E_{p}.json", E), (f"N_{p}.json", Np)):
            write_matrix(out_dir / name, M, {**meta, "root_index": p})
            files.append(name)
    for name, M in (("S.json", dec.S), ("N.json", dec.N)):
        write_matrix(out_dir / name, M, meta)
        files.append(name)

    report.worst_invariant_deviation = max(dec.deviations.values())
    for key, value in dec.deviations.items():
        report.add(f"deviation.{key}", value)
    report.add("violations", ",".join(dec.violations()) or "none")
    report.add("out_dir", str(out_dir))
    report.outputs = {
        "files": files,
        "deviations": dec.deviations,
        "bounds": dec.bounds,
        "violations": dec.violations(),
        "vacuous_roots": list(dec.vacuous_roots),
        "projectors": [matrix_to_json(E) for E in dec.projectors],
        "nilpotents": [matrix_to_json(Np) for Np in dec.nilpotents],
        "S": matrix_to_json(dec.S),
        "N": matrix_to_json(dec.N),
    }
    report.timing_ms = 1e3 * (time.perf_counter() - start)
    write_json(out_dir / "report.json", report.to_json())
    sys.stdout.write(report.render())
    return EXIT_OK


def _kernel_deviation(prob: IVProblem) -> float:
    worst = 0.0
    for j, g in enumerate(prob.kernels):
        deriv = g
        for i in range(prob.spec.d):
            if i:
                deriv = exppoly_derivative(deriv)
            worst = max(worst, abs(exppoly_eval(deriv, 0.0) - (1.0 if i == j else 0.0)))
    return worst


def cmd_ode(args) -> int:
    start = time.perf_counter()
    spec = read_spec(args.spec)
    init = _complex_list(args.init)
    forcing = parse_forcing(args.forcing)
    if len(init) != spec.d:
        raise UsageError(f"--init needs {spec.d} values, got {len(init)}")
    if not args.quad_tol > 0:
        raise UsageError("--quad-tol must be positive")
    if args.grid is not None and args.grid < 1:
        raise UsageError("--grid must be at least 1")
    prob = IVProblem(spec, tuple(init), forcing)
    report = RunReport("ode")
    report.inputs = {"spec": spec.to_json(), "init": [_pair(c) for c in init],
                     "forcing": args.forcing, "t": args.t, "quad_tol": args.quad_tol}
    report.annihilation_residual = verify_annihilates(companion(build_q(spec)), spec)
    report.worst_invariant_deviation = _kernel_deviation(prob)
    try:
        u = solve_ivp(prob, args.t, args.quad_tol)
        grid = []
        if args.grid:
            for i in range(args.grid + 1):
                ti = args.t * i / args.grid
                grid.append((ti, solve_ivp(prob, ti, args.quad_tol)))
    except QuadratureError as exc:
        report.add("status", "quadrature_failure")
        report.add("best_estimate", complex(exc.estimate))
        report.add("achieved_tol", float(exc.achieved))
        report.outputs = {"best_estimate": _pair(exc.estimate), "achieved_tol": float(exc.achieved)}
        report.timing_ms = 1e3 * (time.perf_counter() - start)
        sys.stdout.write(report.render())
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    report.add("t", float(args.t))
    report.add("u", complex(u))
    for ti, ui in grid:
        report.add(f"u({fmt_float(ti)})", complex(ui))
    report.outputs = {"u": _pair(u)}
    if grid:
        report.outputs["grid"] = [[ti, *_pair(ui)] for ti, ui in grid]
    report.timing_ms = 1e3 * (time.perf_counter() - start)
    sys.stdout.write(report.render())
    return EXIT_OK


def _reciprocal_residual(spec: AnnihilatorSpec, p: int, b: np.ndarray) -> float:
    """``|Q_p-series * b - 1|`` over the computed orders."""
    a_p = spec.roots[p][0]
    qp = taylor_shift(cofactor(spec, p), a_p, len(b))
    prod = series_mul(qp, PowerSeries(a_p, b)).coeffs
    target = np.zeros(len(b), dtype=complex)
    target[0] = 1.0
    return float(np.max(np.abs(prod - target)))


def cmd_coeffs(args) -> int:
    start = time.perf_counter()
    spec = read_spec(args.spec)
    if not 0 <= args.p < spec.k:
        raise UsageError(f"--p {args.p} out of range for a spec with {spec.k} roots")
    if args.n_max < 0:
        raise UsageError("--n-max must be nonnegative")
    report = RunReport("coeffs")
    report.inputs = {"spec": spec.to_json(), "p": args.p, "n_max": args.n_max, "method": args.method}
    report.annihilation_residual = verify_annihilates(companion(build_q(spec)), spec)
    results = {}
    if args.method in ("closed", "both"):
        results["closed"] = taylor_coeffs_closed_form(spec, args.p, args.n_max)
    if args.method in ("series", "both"):
        results["series"] = taylor_coeffs_series(spec, args.p, args.n_max)
    for name, b in results.items():
        for n, value in enumerate(b):
            key = f"b[{n}]" if len(results) == 1 else f"{name}.b[{n}]"
            report.add(key, complex(value))
        report.outputs[name] = [_pair(v) for v in b]
    if len(results) == 2:
        dev = float(np.max(np.abs(results["closed"] - results["series"])))
        report.add("max_deviation", dev)
        report.outputs["max_deviation"] = dev
    report.worst_invariant_deviation = max(
        _reciprocal_residual(spec, args.p, b) for b in results.values()
    )
    report.timing_ms = 1e3 * (time.perf_counter() - start)
    sys.stdout.write(report.render())
    return EXIT_OK


def cmd_charpoly(args) -> int:
    start = time.perf_counter()
    A = read_matrix(args.matrix)
    q = characteristic_polynomial(A)
    report = RunReport("charpoly")
    report.inputs = {"matrix": str(args.matrix)}
    report.annihilation_residual = float(np.linalg.norm(mat_poly_eval(q, A)))
    # trace identity for the subleading coefficient
    report.worst_invariant_deviation = (
        abs(q.coeffs[-2] + np.trace(A)) if q.degree >= 1 and len(q) >= 2 else 0.0
    )
    for m, c in enumerate(q.coeffs):
        report.add(f"c[{m}]", complex(c))
    report.outputs = {"coeffs": [_pair(c) for c in q.coeffs]}
    report.timing_ms = 1e3 * (time.perf_counter() - start)
    sys.stdout.write(report.render())
    return EXIT_OK


def _add_spec_options(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("matrix", help="matrix JSON file")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--spec", help="annihilator spec JSON file")
    group.add_argument("--auto-spec", action="store_true",
                       help="derive the spec from the characteristic polynomial")
    sp.add_argument("--cluster-tol", type=float, default=1e-6,
                    help="root clustering tolerance for --auto-spec (default 1e-6)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hermat", description="Matrix functions by Hermite interpolation.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("funm", help="evaluate f(A)")
    _add_spec_options(sp)
    sp.add_argument("--function", "-f", required=True,
                    help="exp, exp:t=<real>, sin, cos, sinh, cosh or poly:<c0,c1,...>")
    sp.add_argument("--out", "-o", help="write f(A) here")
    sp.set_defaults(handler=cmd_funm)

    sp = sub.add_parser("expm", help="evaluate exp(tA)")
    _add_spec_options(sp)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--out", "-o")
    sp.set_defaults(handler=cmd_expm)

    sp = sub.add_parser("spectral", help="spectral projectors and Jordan parts")
    _add_spec_options(sp)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(handler=cmd_spectral)

    sp = sub.add_parser("ode", help="solve Q(d/dt) u = h")
    sp.add_argument("spec")
    sp.add_argument("--init", required=True, help="u(0), u'(0), ... comma separated")
    sp.add_argument("--forcing", default="zero",
                    help="zero, const:<re,im>, cos, sin, exp:<re,im> or poly:<c0,c1,...>")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--quad-tol", type=float, default=1e-10)
    sp.add_argument("--grid", type=int)
    sp.set_defaults(handler=cmd_ode)

    sp = sub.add_parser("coeffs", help="Taylor coefficients of 1/Q_p at a_p")
    sp.add_argument("spec")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--method", choices=("closed", "series", "both"), default="closed")
    sp.set_defaults(handler=cmd_coeffs)

    sp = sub.add_parser("charpoly", help="characteristic polynomial")
    sp.add_argument("matrix")
    sp.set_defaults(handler=cmd_charpoly)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (UsageError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RootFindingError as exc:
        print(f"error: could not derive a spec: {exc}", file=sys.stderr)
        return EXIT_ANNIHILATION
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # unknown selectors, malformed numbers
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
