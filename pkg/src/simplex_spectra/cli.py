"""Command line driver: constant tables, verification suites, rate runs.

Output contract: CSV with header ``dim,N,kind,value,iterations,residual``,
floats printed as the shortest round-trip representation capped at 12
significant digits, rows ordered by N then by a fixed kind order. Exit
codes: 0 success, 1 verification or solver failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .errors import IterationError, NumericError, ParameterError
from .extremal import additive_constant, multiplicative_constant, trace_error_rate
from .forms import h1_form, mass_form, trace_form
from .identities import (
    VerificationReport,
    expand_pair,
    verify_coefficient_bound,
    verify_connection,
    verify_deriv_norm_bound,
    verify_deriv_representation,
    verify_factor_identities,
    verify_hardy,
    verify_weighted_antiderivative,
)
from .simplex import (
    _boundary_norm_direct,
    boundary_trace_parseval,
    dubiner_norm_sq,
    enumerate_basis,
    trace_coefficient_sum,
)

_CSV_HEADER = "dim,N,kind,value,iterations,residual"
_KIND_ORDER = ("mult", "add_h1_denominator", "h1_stability")
_KIND_TOKENS = {
    "mult": "mult",
    "add": "add_h1_denominator",
    "add_h1_denominator": "add_h1_denominator",
    "h1": "h1_stability",
    "h1_stability": "h1_stability",
}
_TABLE_ROWS = {
    1: list(range(1, 6)) + list(range(10, 125, 5)),
    2: list(range(1, 11)) + list(range(15, 60, 5)),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    dim: int = 1
    n_min: int = 1
    n_max: int = 1
    kinds: tuple = ()
    quad_safety: int = 0
    tol: float | None = None
    out_path: str | None = None

    def __post_init__(self):
        if self.n_min < 1 or self.n_max < self.n_min:
            raise ParameterError(f"bad degree range {self.n_min}..{self.n_max}")
        if self.tol is not None and not 0.0 < self.tol <= 1e-6:
            raise ParameterError(f"tol must lie in (0, 1e-6], got {self.tol}")


def _fmt(x: float) -> str:
    text = repr(float(x))
    digits = text.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
    if len(digits) <= 12:
        return text
    return f"{float(x):.12g}"


def _parse_range(text: str, parser: argparse.ArgumentParser):
    lo, sep, hi = text.partition("..")
    if not sep:
        lo = hi = text
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        parser.error(f"range must look like A..B with integers, got {text!r}")
    if a < 1 or b < a:
        parser.error(f"need 1 <= A <= B, got {text!r}")
    return a, b


def _parse_kinds(text: str | None, dim: int, parser: argparse.ArgumentParser):
    if text is None:
        kinds = ["mult", "add_h1_denominator"] + (["h1_stability"] if dim == 2 else [])
        return tuple(kinds)
    out = []
    for token in text.split(","):
        token = token.strip()
        if token not in _KIND_TOKENS:
            parser.error(f"unknown kind {token!r} (choose from mult, add, h1)")
        out.append(_KIND_TOKENS[token])
    return tuple(dict.fromkeys(out))


def _nodes_for(N: int, safety: int) -> int | None:
    return None if safety == 0 else 2 * (2 * N) + 6 + safety


def _emit_constants(cfg: RunConfig, ns, stream) -> int:
    print(_CSV_HEADER, file=stream)
    for N in ns:
        for kind in _KIND_ORDER:
            if kind not in cfg.kinds:
                continue
            try:
                if kind == "mult":
                    rec = multiplicative_constant(N, cfg.dim, nodes=_nodes_for(N, cfg.quad_safety))
                else:
                    numerator = {
                        "add_h1_denominator": "point" if cfg.dim == 1 else "trace",
                        "h1_stability": "h1_of_projection",
                    }[kind]
                    rec = additive_constant(
                        N, cfg.dim, numerator, nodes=_nodes_for(N, cfg.quad_safety)
                    )
            except (IterationError, NumericError) as exc:
                best = getattr(exc, "best", None)
                its = best.iterations if best is not None else 0
                res = _fmt(best.residual) if best is not None else "nan"
                print(f"{cfg.dim},{N},{kind},error,{its},{res}", file=stream)
                print(f"solver failure at N={N} kind={kind}: {exc}", file=sys.stderr)
                return 1
            print(
                f"{rec.dim},{rec.N},{rec.kind},{_fmt(rec.value)},"
                f"{rec.iterations},{_fmt(rec.residual)}",
                file=stream,
            )
    return 0


# verification suite corpora (fixed, no randomness: output must be byte-stable)

def _pair_corpus():
    specs = [
        (np.exp, np.exp, 0, 24),
        (lambda x: np.cos(2.0 * x), lambda x: -2.0 * np.sin(2.0 * x), 1, 24),
        (lambda x: 1.0 / (2.0 + x), lambda x: -1.0 / (2.0 + x) ** 2, 2, 28),
        (lambda x: np.sin(x) + x**3, lambda x: np.cos(x) + 3.0 * x**2, 3, 24),
    ]
    return [expand_pair(fn, dfn, alpha, n) for fn, dfn, alpha, n in specs]


def _hardy_corpus():
    return [
        ("exponential", np.exp, np.exp),
        ("cosine", lambda x: np.cos(3.0 * x), lambda x: -3.0 * np.sin(3.0 * x)),
        ("shifted-cubic", lambda x: (x - 0.3) ** 3, lambda x: 3.0 * (x - 0.3) ** 2),
        ("sqrt-shift", lambda x: np.sqrt(x + 0.5), lambda x: 0.5 / np.sqrt(x + 0.5)),
    ]


def _suite_factor_identities(args) -> VerificationReport:
    return verify_factor_identities(50, 20, _h2_offset=args.perturb_h2)


def _suite_connection(args) -> VerificationReport:
    return verify_connection(_pair_corpus())


def _suite_weighted_antiderivative(args) -> VerificationReport:
    return verify_weighted_antiderivative()


def _suite_deriv_representation(args) -> VerificationReport:
    return verify_deriv_representation()


def _suite_deriv_norm_bound(args) -> VerificationReport:
    return verify_deriv_norm_bound(60, 30)


def _suite_hardy(args) -> VerificationReport:
    return verify_hardy([0.0, 0.5, 1.0, 2.0, 3.0], _hardy_corpus())


def _suite_coefficient_bound(args) -> VerificationReport:
    return verify_coefficient_bound(_pair_corpus())


def _suite_orthogonality(args) -> VerificationReport:
    details, worst_case, worst = {}, "", -1.0
    for dim, M in ((2, 8), (3, 6)):
        form = mass_form(M, dim, nodes=2 * M + 6 + args.quad_safety)
        dev = np.abs(form.entries - np.eye(form.basis.cardinality))
        details[f"gram-dim{dim}"] = float(np.max(dev))
        if details[f"gram-dim{dim}"] > worst:
            worst = details[f"gram-dim{dim}"]
            i, j = np.unravel_index(np.argmax(dev), dev.shape)
            worst_case = f"gram-dim{dim} at {form.basis.indices[i]} x {form.basis.indices[j]}"
    # doubling exactness, relative to the largest entry of each form
    for label, build in (
        ("mass-3d", lambda nn: mass_form(5, 3, nodes=nn(16))),
        ("h1-2d", lambda nn: h1_form(7, 2, nodes=nn(20))),
        ("trace-2d", lambda nn: trace_form(6, 2, "edge", nodes=nn(18))),
    ):
        base = build(lambda m: m + args.quad_safety)
        dbl = build(lambda m: 2 * m + args.quad_safety)
        scale = max(float(np.max(np.abs(base.entries))), 1.0)
        details[f"doubling-{label}"] = float(np.max(np.abs(base.entries - dbl.entries))) / scale
    n = sum(
        (enumerate_basis(M, dim).cardinality ** 2 for dim, M in ((2, 8), (3, 6))), 3
    )
    return VerificationReport(
        name="orthogonality", n_checks=n, tolerance=1e-11, details=details, worst_case=worst_case
    )


def _suite_finite_sum(args) -> VerificationReport:
    fns = [
        ("cubic", lambda x: x[:, 2] ** 3),
        ("mixed", lambda x: x[:, 0] * x[:, 1] + 0.5 * x[:, 1] * x[:, 2] ** 2),
        ("quintic", lambda x: (0.3 + x[:, 0] + 0.7 * x[:, 1] - 0.4 * x[:, 2]) ** 5),
    ]
    details, worst_case, worst = {}, "", -1.0
    n = 0
    for label, fn in fns:
        for p, q in ((0, 0), (1, 0), (0, 1), (1, 1), (2, 1)):
            for N in (1, 2, 3):
                tail, short = trace_coefficient_sum(fn, p, q, N, nodes=40 + args.quad_safety)
                r = abs(tail - short) / max(1.0, abs(tail))
                key = f"{label}-p{p}q{q}N{N}"
                n += 1
                if r > worst:
                    worst, worst_case = r, key
                details[key] = r
    return VerificationReport(
        name="finite-sum", n_checks=n, tolerance=1e-10, details=details, worst_case=worst_case
    )


def _suite_trace_parseval(args) -> VerificationReport:
    corpus = [
        (2, "edge", "affine", lambda x: 1.0 + x[:, 0] - 0.5 * x[:, 1]),
        (2, "edge", "quartic", lambda x: (x[:, 0] + x[:, 1] ** 3) ** 1 + x[:, 0] ** 4),
        (3, "face", "affine", lambda x: 1.0 - x[:, 0] + 0.5 * x[:, 1] + 0.25 * x[:, 2]),
        (3, "face", "cubic", lambda x: x[:, 0] * x[:, 2] + x[:, 1] ** 3),
    ]
    details, worst_case, worst = {}, "", -1.0
    for dim, gamma, label, fn in corpus:
        via_sum = boundary_trace_parseval(fn, dim, gamma, N=12)
        direct = _boundary_norm_direct(fn, dim, nodes=40 + args.quad_safety)
        key = f"dim{dim}-{label}"
        details[key] = abs(via_sum - direct) / max(1.0, abs(direct))
        if details[key] > worst:
            worst, worst_case = details[key], key
    return VerificationReport(
        name="trace-parseval",
        n_checks=len(corpus),
        tolerance=1e-10,
        details=details,
        worst_case=worst_case,
    )


_SUITES = (
    ("factor-identities", _suite_factor_identities),
    ("connection", _suite_connection),
    ("weighted-antiderivative", _suite_weighted_antiderivative),
    ("deriv-representation", _suite_deriv_representation),
    ("deriv-norm-bound", _suite_deriv_norm_bound),
    ("hardy", _suite_hardy),
    ("coefficient-bound", _suite_coefficient_bound),
    ("orthogonality", _suite_orthogonality),
    ("finite-sum", _suite_finite_sum),
    ("trace-parseval", _suite_trace_parseval),
)


def _run_verify(args, parser) -> int:
    names = [name for name, _ in _SUITES]
    if args.suite is not None and args.suite not in names:
        parser.error(f"unknown suite {args.suite!r} (choose from {', '.join(names)})")
    failures = []
    for name, runner in _SUITES:
        if args.suite is not None and name != args.suite:
            continue
        report = runner(args)
        tol = args.tol if args.tol is not None else report.tolerance
        ok = report.max_residual <= tol
        status = "ok" if ok else "FAIL"
        print(f"{name}: max residual {report.max_residual:.3e} (tol {tol:.1e}) {status}")
        if not ok:
            print(f"  worst: {report.worst_case}")
            failures.append(name)
    if failures:
        print(f"failed suites: {', '.join(failures)}", file=sys.stderr)
        return 1
    return 0


def _rate_function(family: str, n_min: int, parser):
    if family == "poly":
        d = min(3, n_min)
        return lambda x: (0.25 + x[:, 0] + 0.5 * x[:, 1]) ** d
    if family == "analytic":
        return lambda x: np.exp(x[:, 0] + x[:, 1])
    if family.startswith("hs:"):
        try:
            s = float(family[3:])
        except ValueError:
            parser.error(f"bad family {family!r}")
        if not s > 0.5:
            parser.error(f"hs family needs s > 1/2, got {s}")
        return lambda x: ((x[:, 0] - 1.0) ** 2 + (x[:, 1] + 1.0) ** 2) ** (s / 2.0)
    parser.error(f"unknown family {family!r} (choose poly, analytic, or hs:S)")


def _run_rates(args, parser) -> int:
    a, b = _parse_range(args.n, parser)
    fn = _rate_function(args.family, a, parser)
    nodes = None if args.quad_safety == 0 else 2 * b + 40 + args.quad_safety
    rows, slope = trace_error_rate(fn, list(range(a, b + 1)), nodes=nodes)
    stream = open(args.out, "w") if args.out else sys.stdout
    try:
        print("family,N,error", file=stream)
        for N, err in rows:
            print(f"{args.family},{N},{_fmt(err)}", file=stream)
        print(f"{args.family},slope,{_fmt(slope)}", file=stream)
    finally:
        if args.out:
            stream.close()
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="simplex-spectra",
        description="Projection stability constants and identity checks on "
        "interval, triangle, and tetrahedron bases.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_const = sub.add_parser("constants", help="compute constants over a degree range")
    p_const.add_argument("--dim", type=int, choices=(1, 2), required=True)
    p_const.add_argument("--n", required=True, help="degree range A..B")
    p_const.add_argument("--kinds", help="comma list: mult, add, h1 (default: all for dim)")
    p_const.add_argument("--out", help="write CSV here instead of stdout")
    p_const.add_argument("--quad-safety", type=int, default=0, help="extra quadrature points")

    p_verify = sub.add_parser("verify", help="run the identity verification suites")
    p_verify.add_argument("--suite", help="run one suite by name")
    p_verify.add_argument("--tol", type=float, help="override residual threshold, in (0, 1e-6]")
    p_verify.add_argument("--quad-safety", type=int, default=0, help="extra quadrature points")
    p_verify.add_argument("--perturb-h2", type=float, default=0.0, help=argparse.SUPPRESS)

    p_rates = sub.add_parser("rates", help="boundary projection error rates")
    p_rates.add_argument("--family", required=True, help="poly | analytic | hs:S")
    p_rates.add_argument("--n", required=True, help="degree range A..B")
    p_rates.add_argument("--out", help="write CSV here instead of stdout")
    p_rates.add_argument("--quad-safety", type=int, default=0, help="extra quadrature points")

    p_table = sub.add_parser("table", help="reproduce a published table's row set")
    p_table.add_argument("which", type=int, choices=(1, 2))
    p_table.add_argument("--out", help="write CSV here instead of stdout")
    p_table.add_argument("--quad-safety", type=int, default=0, help="extra quadrature points")

    args = parser.parse_args(argv)

    if args.command == "verify":
        if args.tol is not None and not 0.0 < args.tol <= 1e-6:
            parser.error(f"tol must lie in (0, 1e-6], got {args.tol}")
        return _run_verify(args, parser)
    if args.command == "rates":
        return _run_rates(args, parser)

    if args.command == "constants":
        a, b = _parse_range(args.n, parser)
        kinds = _parse_kinds(args.kinds, args.dim, parser)
        cfg = RunConfig(
            command="constants",
            dim=args.dim,
            n_min=a,
            n_max=b,
            kinds=kinds,
            quad_safety=args.quad_safety,
            out_path=args.out,
        )
        ns = range(a, b + 1)
    else:
        dim = args.which
        cfg = RunConfig(
            command="table",
            dim=dim,
            n_min=_TABLE_ROWS[dim][0],
            n_max=_TABLE_ROWS[dim][-1],
            kinds=_parse_kinds(None, dim, parser),
            quad_safety=args.quad_safety,
            out_path=args.out,
        )
        ns = _TABLE_ROWS[dim]

    stream = open(cfg.out_path, "w") if cfg.out_path else sys.stdout
    try:
        return _emit_constants(cfg, ns, stream)
    finally:
        if cfg.out_path:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
