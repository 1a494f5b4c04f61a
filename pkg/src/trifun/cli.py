"""Command-line front end.

Reports go to stdout as deterministic JSON (``bench`` writes CSV). Errors go
to stderr as one JSON object, with exit codes

    2  input does not parse to a triangular matrix (or bad usage)
    3  degenerate spectrum
    4  function or oracle domain violation
    5  oracle disagreement above --check-tol
    6  nonpositive diagonal in a generator snapshot
"""

import argparse
import csv
import io
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import io as tio
from .exceptions import (
    DegenerateSpectrum,
    DimensionMismatch,
    DomainViolation,
    EigenvalueOnCut,
    NonPositiveDiagonal,
    NotConverged,
    NotTriangular,
    SingularResolvent,
    SpectralRadiusTooLarge,
    TrifunError,
)
from .funm import apply, exp_semigroup, function_from_name, parlett_apply
from .genlog import (
    DEFAULT_MARKOV_TOL,
    SemigroupSample,
    check_markov,
    extract_generator,
    verify_generator,
)
from .matcore import DEFAULT_SEP_TOL, spectrum_info, validate_simple_spectrum
from .oracles import exp_series, log_integral
from .sampling import make_rng, random_lower_triangular
from .theta import (
    check_identities,
    compute_theta,
    conditioning_indicator,
    eigenpair,
    theta_from_eigenvectors,
)

DEFAULT_CHECK_TOL = 1e-8


class UsageError(TrifunError, ValueError):
    pass


class OracleDisagreement(TrifunError):
    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(f"oracle residual {self.residual:g} exceeds --check-tol {self.tol:g}")

    def details(self):
        return {"residual": self.residual, "tol": self.tol}


EXIT_CODES = [
    ((tio.MatrixFileError, NotTriangular, DimensionMismatch, UsageError), 2),
    ((DegenerateSpectrum,), 3),
    ((DomainViolation, EigenvalueOnCut, SpectralRadiusTooLarge, SingularResolvent), 4),
    ((OracleDisagreement, NotConverged), 5),
    ((NonPositiveDiagonal,), 6),
]


def exit_code_for(exc):
    for types, code in EXIT_CODES:
        if isinstance(exc, types):
            return code
    return 2


def error_document(code, exc):
    details = exc.details() if isinstance(exc, TrifunError) else {}
    return {"error": {"code": code, "type": type(exc).__name__, "message": str(exc), "details": details}}


class Phases:
    """Per-phase call counts, with wall-clock nanoseconds when enabled."""

    def __init__(self, timing):
        self.timing = timing
        self.counts = {}
        self.nanos = {}

    @contextmanager
    def __call__(self, name):
        start = time.perf_counter_ns()
        try:
            yield
        finally:
            self.counts[name] = self.counts.get(name, 0) + 1
            self.nanos[name] = self.nanos.get(name, 0) + time.perf_counter_ns() - start

    def report(self):
        out = {}
        for name, count in self.counts.items():
            entry = {"count": count}
            if self.timing:
                entry["nanos"] = self.nanos[name]
            out[name] = entry
        return {"phases": out}


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _input_parent():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "csv"), default=None,
                   help="input format (guessed from extension or content)")
    orient = p.add_mutually_exclusive_group()
    orient.add_argument("--lower", dest="orientation", action="store_const", const="lower")
    orient.add_argument("--upper", dest="orientation", action="store_const", const="upper")
    orient.add_argument("--dense", dest="orientation", action="store_const", const="dense")
    p.set_defaults(orientation="dense")
    p.add_argument("--zero-tol", type=float, default=0.0)
    p.add_argument("--sep-tol", type=float, default=DEFAULT_SEP_TOL)
    p.add_argument("--check-tol", type=float, default=DEFAULT_CHECK_TOL)
    p.add_argument("--markov-tol", type=float, default=DEFAULT_MARKOV_TOL)
    p.add_argument("--timing", action="store_true", help="include wall-clock nanoseconds")
    return p


def build_parser():
    parser = ArgumentParser(prog="trifun", description="Functions of simple triangular matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)
    parent = _input_parent()

    def add_input(p):
        p.add_argument("input", help="matrix file, or - for stdin")
        return p

    p = add_input(sub.add_parser("theta", parents=[parent], help="coefficient table and identity residuals"))
    p.add_argument("--oracle", action="store_true", help="compare with the eigenvector table")

    p = sub.add_parser("apply", parents=[parent], help="evaluate a builtin matrix function")
    p.add_argument("fn", choices=("exp", "log", "pow", "inv", "poly"))
    add_input(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--coeffs", type=_float_list, default=None)
    p.add_argument("--route", choices=("theta", "parlett"), default="theta")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--nodes", type=int, default=32, help="quadrature nodes for the log oracle")

    p = add_input(sub.add_parser("generator", parents=[parent], help="extract the generator of a snapshot"))
    p.add_argument("--t", type=float, required=True)

    p = add_input(sub.add_parser("semigroup", parents=[parent], help="exp(tB) for several times"))
    p.add_argument("--ts", type=_float_list, required=True)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--parallel", action="store_true")

    add_input(sub.add_parser("check", parents=[parent], help="identity and Markov checks only"))

    p = sub.add_parser("bench", help="time the three exp routes on seeded matrices (CSV)")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--separations", type=_float_list, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--parallel", action="store_true")
    return parser


def _read_input(args, phases, stdin):
    with phases("parse"):
        if args.input == "-":
            data = stdin.read()
            if isinstance(data, str):
                data = data.encode()
            name = None
        else:
            try:
                with open(args.input, "rb") as fh:
                    data = fh.read()
            except OSError as exc:
                raise tio.MatrixFileError(f"cannot read {args.input}: {exc.strerror}") from None
            name = args.input
        M = tio.read_matrix(data, args.format, args.orientation, args.zero_tol, name)
    return M, tio.digest(data)


def _spectrum_doc(info):
    return {
        "diagonal": [tio.scalar_value(x) for x in info.diagonal],
        "min_separation": info.min_separation,
        "scale": info.scale,
        "relative_separation": info.relative_separation,
        "closest_pair": None if info.closest_pair is None else [i + 1 for i in info.closest_pair],
    }


def _table_doc(T):
    return [[n + 1, k + 1, m + 1, tio.scalar_value(v)] for n, k, m, v in T.triplets()]


def _base_report(argv, digest, info):
    return {"command": list(argv), "input_digest": digest, "spectrum": _spectrum_doc(info)}


def _validated_table(B, args, phases):
    with phases("validate"):
        info = validate_simple_spectrum(B, args.sep_tol)
    with phases("theta"):
        T = compute_theta(B, info)
    return info, T


def cmd_theta(args, argv, stdin):
    phases = Phases(args.timing)
    B, digest = _read_input(args, phases, stdin)
    info, T = _validated_table(B, args, phases)
    with phases("identities"):
        ident = check_identities(B, T, args.check_tol)
    report = _base_report(argv, digest, info)
    residuals = dict(ident.residuals)
    report.update(conditioning=conditioning_indicator(T), theta=_table_doc(T),
                  identities_ok=ident.ok)
    if args.oracle:
        with phases("oracle"):
            ref = theta_from_eigenvectors(B, info)
        residuals["oracle"] = float(np.max(np.abs(T.values - ref.values)))
    report["residuals"] = residuals
    report["timing"] = phases.report()
    return report, residuals.get("oracle")


def _matrix_oracle(B, f, nodes):
    D = B.to_dense()
    d = B.dim
    if f.kind == "exp":
        return exp_series(f.t * D)
    if f.kind == "log":
        return log_integral(D, nodes)
    if f.kind == "inv":
        return np.linalg.inv(D)
    if f.kind == "pow":
        if f._integer_power():
            return np.linalg.matrix_power(D, int(f.alpha))
        return exp_series(f.alpha * log_integral(D, nodes))
    acc = np.zeros((d, d), dtype=np.result_type(D, np.asarray(f.coeffs)))
    for c in reversed(f.coeffs):
        acc = acc @ D + c * np.eye(d)
    return acc


def cmd_apply(args, argv, stdin):
    phases = Phases(args.timing)
    if args.fn == "pow" and args.alpha is None:
        raise UsageError("pow needs --alpha")
    if args.fn == "poly" and not args.coeffs:
        raise UsageError("poly needs --coeffs")
    f = function_from_name(args.fn, args.t, 1.0 if args.alpha is None else args.alpha, args.coeffs)
    B, digest = _read_input(args, phases, stdin)
    report = {}
    if args.route == "parlett":
        with phases("validate"):
            info = validate_simple_spectrum(B, args.sep_tol)
        with phases("apply"):
            F = parlett_apply(B, f, args.sep_tol)
    else:
        info, T = _validated_table(B, args, phases)
        report["conditioning"] = conditioning_indicator(T)
        with phases("apply"):
            F = apply(B, T, f)
    report.update(_base_report(argv, digest, info))
    report.update(function=f.name, route=args.route, result=tio.matrix_document(F))
    residuals = {}
    if args.oracle:
        with phases("oracle"):
            ref = _matrix_oracle(B, f, args.nodes)
        residuals["oracle"] = float(np.max(np.abs(F.to_dense() - ref)))
    report["residuals"] = residuals
    report["timing"] = phases.report()
    return report, residuals.get("oracle")


def cmd_generator(args, argv, stdin):
    phases = Phases(args.timing)
    P, digest = _read_input(args, phases, stdin)
    if not args.t > 0:
        raise DomainViolation("generator", None, args.t, "snapshot time must be positive")
    with phases("validate"):
        sample = SemigroupSample(P, args.t)
        info = validate_simple_spectrum(P, args.sep_tol)
    with phases("eta"):
        R = extract_generator(sample, args.sep_tol, args.markov_tol)
    with phases("verify"):
        check = verify_generator(R, sample)
    markov = check_markov(P, args.markov_tol)
    diag = R.diagnostics
    report = _base_report(argv, digest, info)
    report.update(
        result=tio.matrix_document(R.B),
        eta=_table_doc(R.eta),
        conditioning=diag.conditioning,
        diagnostics={
            "markov_input": diag.markov_input,
            "rate_matrix": diag.rate_matrix,
            "row_sums_of_B": [tio.scalar_value(x) for x in diag.row_sums_of_B],
            "markov_report": {
                "nonnegative": markov.nonnegative,
                "unit_row_sums": markov.unit_row_sums,
                "diagonal_in_unit_interval": markov.diagonal_in_unit_interval,
                "min_entry": markov.min_entry,
                "max_row_sum_error": markov.max_row_sum_error,
            },
        },
        residuals={"reconstruction": check.residual},
        verified=check.ok,
        verify_tol=check.tol,
        t=args.t,
    )
    report["timing"] = phases.report()
    return report, None


def _semigroup_law_residual(ts, Ps):
    worst = None
    for i, ti in enumerate(ts):
        for j in range(i, len(ts)):
            target = ti + ts[j]
            for k, tk in enumerate(ts):
                if math.isclose(target, tk, rel_tol=1e-12, abs_tol=1e-15):
                    r = float(np.max(np.abs(Ps[i].to_dense() @ Ps[j].to_dense() - Ps[k].to_dense())))
                    worst = r if worst is None else max(worst, r)
    return worst


def cmd_semigroup(args, argv, stdin):
    phases = Phases(args.timing)
    B, digest = _read_input(args, phases, stdin)
    info, T = _validated_table(B, args, phases)
    with phases("semigroup"):
        Ps = exp_semigroup(B, T, args.ts, parallel=args.parallel)
    report = _base_report(argv, digest, info)
    residuals = {}
    law = _semigroup_law_residual(args.ts, Ps)
    if law is not None:
        residuals["semigroup_law"] = law
    if args.oracle:
        with phases("oracle"):
            residuals["oracle"] = max(
                float(np.max(np.abs(P.to_dense() - exp_series(t * B.to_dense()))))
                for t, P in zip(args.ts, Ps)
            )
    report.update(conditioning=conditioning_indicator(T), ts=list(args.ts),
                  results=[tio.matrix_document(P) for P in Ps], residuals=residuals)
    report["timing"] = phases.report()
    return report, residuals.get("oracle")


def cmd_check(args, argv, stdin):
    phases = Phases(args.timing)
    B, digest = _read_input(args, phases, stdin)
    info, T = _validated_table(B, args, phases)
    with phases("identities"):
        ident = check_identities(B, T, args.check_tol)
    report = _base_report(argv, digest, info)
    markov = None
    if B.scalar_kind == "real":
        with phases("markov"):
            m = check_markov(B, args.markov_tol)
        markov = {
            "is_markov": m.is_markov,
            "nonnegative": m.nonnegative,
            "unit_row_sums": m.unit_row_sums,
            "diagonal_in_unit_interval": m.diagonal_in_unit_interval,
            "min_entry": m.min_entry,
            "max_row_sum_error": m.max_row_sum_error,
        }
    report.update(conditioning=conditioning_indicator(T), residuals=ident.residuals,
                  identities_ok=ident.ok, markov=markov)
    report["timing"] = phases.report()
    return report, None


ROUTES = ("theta", "parlett", "eigen")


def _bench_instance(d, gap, sample, seed, t):
    rng = make_rng(seed, d, sample)
    B = random_lower_triangular(rng, d, min_gap=1.0)
    # rescale the diagonal pattern so the smallest gap equals the requested one
    diag = B.diagonal()
    entries = B.entries.copy()
    for i in range(d):
        entries[i * (i + 1) // 2 + i] = diag[i] * gap
    B = B.with_entries(entries)
    f = function_from_name("exp", t)
    outputs, nanos = {}, {}

    start = time.perf_counter_ns()
    info = validate_simple_spectrum(B, 0.0)
    T = compute_theta(B, info)
    outputs["theta"] = apply(B, T, f).to_dense()
    nanos["theta"] = time.perf_counter_ns() - start

    start = time.perf_counter_ns()
    outputs["parlett"] = parlett_apply(B, f, 0.0).to_dense()
    nanos["parlett"] = time.perf_counter_ns() - start

    start = time.perf_counter_ns()
    pair = eigenpair(B, validate_simple_spectrum(B, 0.0))
    U, V = pair.U.to_dense(), pair.U_inv.to_dense()
    outputs["eigen"] = (U * np.exp(t * B.diagonal())) @ V
    nanos["eigen"] = time.perf_counter_ns() - start

    residual = {}
    for r in ROUTES:
        others = [float(np.max(np.abs(outputs[r] - outputs[o]))) for o in ROUTES if o != r]
        residual[r] = max(others)
    return nanos, residual, conditioning_indicator(T)


def cmd_bench(args, argv, stdin):
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if any(d < 1 for d in args.dims) or any(not g > 0 for g in args.separations):
        raise UsageError("dims must be positive integers and separations positive")
    jobs = [(d, g, s) for d in args.dims for g in args.separations for s in range(args.samples)]
    run = lambda job: _bench_instance(*job, args.seed, args.t)
    if args.parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["d", "gap", "route", "nanos", "residual", "conditioning"])
    i = 0
    for d in args.dims:
        for g in args.separations:
            group = results[i:i + args.samples]
            i += args.samples
            cond = max(c for _, _, c in group)
            for r in ROUTES:
                nanos = sum(n[r] for n, _, _ in group) if args.timing else ""
                resid = max(res[r] for _, res, _ in group)
                writer.writerow([d, tio.format_float(g), r, nanos,
                                 tio.format_float(resid), tio.format_float(cond)])
    return buf.getvalue(), None


COMMANDS = {
    "theta": cmd_theta,
    "apply": cmd_apply,
    "generator": cmd_generator,
    "semigroup": cmd_semigroup,
    "check": cmd_check,
    "bench": cmd_bench,
}


def main(argv=None, stdin=None, stdout=None, stderr=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    stdin = sys.stdin.buffer if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        stderr.write(tio.dumps(error_document(2, exc)) + "\n")
        return 2
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        output, oracle_residual = COMMANDS[args.command](args, ["trifun"] + argv, stdin)
    except (TrifunError, ValueError) as exc:
        code = exit_code_for(exc)
        stderr.write(tio.dumps(error_document(code, exc)) + "\n")
        return code
    if isinstance(output, str):
        stdout.write(output)
    else:
        stdout.write(tio.dumps(output) + "\n")
    if oracle_residual is not None and not oracle_residual <= args.check_tol:
        exc = OracleDisagreement(oracle_residual, args.check_tol)
        stderr.write(tio.dumps(error_document(5, exc)) + "\n")
        return 5
    return 0


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
