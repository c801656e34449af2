"""Command-line front end: analyze, synth, verify, converge, sweep.

Exit codes: 0 on success, 1 when a verification fails, 2 for usage or parse
errors.  Rational-mode output prints exact values as "p/q" strings; float
output uses shortest round-trip decimals, so identical inputs give
byte-identical reports.  SPLITKIT_MODE sets the default numeric mode.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import construct, dynamics
from .bch import expand_scheme
from .bounds import VIOLATION_TOL, bound_part_a, bound_part_b, correctability_residual
from .errors import (
    DegenerateG,
    NegativeG,
    NonFinite,
    PreconditionViolated,
    RadicandNegative,
    SchemeParseError,
    SingularAlpha,
    SplitkitError,
    UnsupportedN,
)
from .scheme import (
    VELOCITY,
    SplittingScheme,
    atomic_write_text,
    delta_g,
    delta_g_prime,
    error_coefficients,
    exactify,
    format_number,
    g_sum,
    is_symmetric,
    load_scheme,
    parse_number,
    save_scheme,
    scalars_close,
)

DEFAULT_SEED = 20120

_USAGE_ERRORS = (
    SchemeParseError,
    PreconditionViolated,
    DegenerateG,
    NegativeG,
    SingularAlpha,
    UnsupportedN,
    RadicandNegative,
    NonFinite,
)


def _resolve_mode(mode: str, scheme: SplittingScheme) -> str:
    if mode == "auto":
        mode = os.environ.get("SPLITKIT_MODE", "auto")
    if mode == "auto":
        return "rational" if scheme.is_exact() else "float"
    return mode


def _apply_mode(scheme: SplittingScheme, mode: str) -> SplittingScheme:
    return scheme.as_exact() if mode == "rational" else scheme.as_float()


def _emit(text: str, out_path) -> None:
    if out_path:
        atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def analysis_document(scheme: SplittingScheme) -> dict:
    """Full analysis of one scheme: coefficients, cubic sums, bounds."""
    ec = error_coefficients(scheme)
    doc = {
        "label": scheme.label,
        "kind": scheme.kind,
        "n": scheme.n,
        "normalized": scheme.is_normalized(),
        "symmetric": is_symmetric(scheme),
        "forward": scheme.is_forward(),
        "t": [format_number(x) for x in scheme.t],
        "v": [format_number(x) for x in scheme.v],
        "error_coefficients": {
            "e_T": format_number(ec.e_T),
            "e_V": format_number(ec.e_V),
            "e_TV": format_number(ec.e_TV),
            "e_TTV": format_number(ec.e_TTV),
            "e_VTV": format_number(ec.e_VTV),
        },
    }
    if scheme.gradient:
        doc["gradient"] = [
            {"index": g.index, "c": format_number(g.c)} for g in scheme.gradient
        ]
        doc["gradient_total"] = format_number(scheme.gradient_total())
        ec_plain = error_coefficients(scheme, include_gradient=False)
        doc["error_coefficients_without_gradient"] = {
            "e_TV": format_number(ec_plain.e_TV),
            "e_TTV": format_number(ec_plain.e_TTV),
            "e_VTV": format_number(ec_plain.e_VTV),
        }
    doc["delta_g"] = format_number(delta_g(scheme))
    doc["delta_g_prime"] = format_number(delta_g_prime(scheme))
    if scalars_close(sum(scheme.t), 1):
        g = g_sum(scheme)
        dg = exactify(delta_g(scheme))
        doc["g"] = format_number(g)
        doc["g_identity_residual"] = format_number(g - (1 - dg) / 3)
    doc["correctability_residual"] = format_number(correctability_residual(ec))
    part = "A" if scheme.kind == VELOCITY else "B"
    try:
        report = bound_part_a(scheme) if part == "A" else bound_part_b(scheme)
        doc["bound"] = {"applicable": True, **report.to_dict()}
    except PreconditionViolated as exc:
        doc["bound"] = {"applicable": False, "part": part, "reason": str(exc)}
    return doc


def _flatten(doc, prefix=""):
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, prefix=f"{name}.")
        elif isinstance(value, list) and not any(isinstance(x, dict) for x in value):
            yield name, " ".join(str(x) for x in value)
        elif isinstance(value, list):
            yield name, json.dumps(value)
        else:
            yield name, value


def _format_document(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    rows = list(_flatten(doc))
    if fmt == "csv":
        return "".join(f"{k},{v}\n" for k, v in rows)
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)


def cmd_analyze(args) -> int:
    scheme = load_scheme(args.scheme)
    mode = _resolve_mode(args.mode, scheme)
    scheme = _apply_mode(scheme, mode)
    doc = analysis_document(scheme)
    doc["mode"] = mode
    _emit(_format_document(doc, args.format), args.out)
    return 0


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def _parse_coeff_list(text: str) -> tuple:
    try:
        return tuple(parse_number(item.strip()) for item in text.split(","))
    except SchemeParseError:
        raise
    except ValueError as exc:
        raise SchemeParseError(f"bad coefficient list {text!r}: {exc}") from None


def _coefficient_table(scheme: SplittingScheme) -> str:
    lines = [f"label: {scheme.label}", f"kind: {scheme.kind}", "i  t_i  v_i  gradient_i"]
    for i in range(scheme.n):
        gc = scheme.gradient_at(i + 1)
        parts = [str(i + 1), str(format_number(scheme.t[i])), str(format_number(scheme.v[i]))]
        parts.append(str(format_number(gc)) if gc else "-")
        lines.append("  ".join(parts))
    return "\n".join(lines) + "\n"


def synthesize(args) -> SplittingScheme:
    family = args.family
    if family == "forest-ruth":
        return construct.forest_ruth()
    if family == "zero-dg":
        if args.ratios is not None:
            ratios = tuple(float(r) for r in _parse_coeff_list(args.ratios))
            drifts = construct.zero_dg_drifts_from_ratios(ratios)
            label = f"zero-dg ratios={args.ratios} n={len(drifts)}"
        else:
            drifts = construct.zero_dg_symmetric_drifts(args.n, args.alpha)
            label = f"zero-dg alpha={args.alpha:.17g} n={args.n}"
        return construct.velocity_from_drifts(drifts, label=label)
    if family == "gradient-velocity":
        if args.t is None:
            raise PreconditionViolated("--family gradient-velocity requires --t")
        return construct.gradient_velocity(_parse_coeff_list(args.t), args.placement)
    if family == "gradient-position":
        if args.v is None:
            raise PreconditionViolated("--family gradient-position requires --v")
        return construct.gradient_position(_parse_coeff_list(args.v), args.placement)
    raise PreconditionViolated(f"unknown family {family!r}")


def cmd_synth(args) -> int:
    scheme = synthesize(args)
    if args.prune:
        scheme = construct.prune_zero_factors(scheme)
    save_scheme(scheme, args.out)
    sys.stdout.write(_coefficient_table(scheme))
    sys.stdout.write(f"wrote {args.out}\n")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def verify_scheme(scheme: SplittingScheme, tol: float) -> list:
    """Formula-vs-oracle comparison plus identity and bound checks.

    Returns (name, passed, detail) triples; exact schemes are compared with
    zero tolerance.
    """
    exact = scheme.is_exact()
    checks = []

    def close(a, b):
        return a == b if exact else abs(float(a) - float(b)) <= tol

    ec = error_coefficients(scheme)
    oracle = expand_scheme(scheme)
    names = ("e_T", "e_V", "e_TV", "e_TTV", "e_VTV")
    for name, formula, direct in zip(names, ec.as_tuple(), oracle.coordinates()):
        ok = close(formula, direct)
        detail = f"formula={format_number(formula)} oracle={format_number(direct)}"
        checks.append((f"coefficient {name}", ok, detail))
    for name, value in (("e_T", ec.e_T), ("e_V", ec.e_V)):
        checks.append(
            (
                f"primary constraint {name} = 1",
                close(value, 1),
                f"{name}={format_number(value)}",
            )
        )
    if scalars_close(sum(scheme.t), 1):
        residual = g_sum(scheme) - (1 - exactify(delta_g(scheme))) / 3
        ok = close(residual, 0)
        checks.append(("g identity", ok, f"residual={format_number(residual)}"))
    else:
        checks.append(("g identity", True, "skipped: drift sum not 1"))
    part = "A" if scheme.kind == VELOCITY else "B"
    try:
        report = bound_part_a(scheme) if part == "A" else bound_part_b(scheme)
        gap_tol = 0.0 if exact else max(tol, VIOLATION_TOL)
        ok = float(report.gap) >= -gap_tol
        checks.append(
            (f"part {part} bound", ok, f"gap={format_number(report.gap)}")
        )
    except PreconditionViolated as exc:
        checks.append((f"part {part} bound", True, f"skipped: {exc}"))
    return checks


def cmd_verify(args) -> int:
    scheme = load_scheme(args.scheme)
    if not scheme.is_exact() and not args.float:
        sys.stderr.write(
            "error: scheme has float coefficients; rerun with --float for "
            "toleranced verification\n"
        )
        return 2
    checks = verify_scheme(scheme, args.tol)
    failed = 0
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        failed += not ok
        sys.stdout.write(f"{status} {name}: {detail}\n")
    sys.stdout.write("verification " + ("passed\n" if not failed else "FAILED\n"))
    return 0 if not failed else 1


# ---------------------------------------------------------------------------
# converge
# ---------------------------------------------------------------------------

def cmd_converge(args) -> int:
    scheme = load_scheme(args.scheme)
    try:
        system = dynamics.builtin_system(args.system)
    except KeyError as exc:
        raise PreconditionViolated(str(exc)) from None
    state0 = dynamics.default_initial_state(system)
    t_final = args.t_final
    h_list = []
    for k in range(args.levels):
        h = args.h0 / 2**k
        n = max(1, round(t_final / h))
        h_list.append(t_final / n)  # snap so each h divides t_final exactly
    report = dynamics.convergence_study(scheme, system, state0, t_final, h_list)
    if args.format == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        rows = report.csv_rows()
        text = "".join(",".join(row) + "\n" for row in rows)
        text += f"# slope = {report.slope!r}\n"
    _emit(text, args.out)
    if args.out:
        sys.stdout.write(f"slope = {report.slope!r}\n")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _parse_range(text: str) -> list:
    parts = text.split(":")
    if len(parts) != 3:
        raise PreconditionViolated(
            f"range must be start:stop:step, got {text!r}"
        )
    start, stop, step_sz = (float(p) for p in parts)
    if step_sz <= 0:
        raise PreconditionViolated(f"range step must be positive, got {step_sz}")
    values = []
    k = 0
    while True:
        value = start + k * step_sz
        if value > stop + 1e-12:
            break
        values.append(value)
        k += 1
    if not values:
        raise PreconditionViolated(f"range {text!r} is empty")
    return values


def cmd_sweep(args) -> int:
    if args.family != "zero-dg":
        raise PreconditionViolated("sweep supports --family zero-dg")
    alphas = _parse_range(args.alpha_range)
    os.makedirs(args.out_dir, exist_ok=True)
    header = ["alpha", "t3", "t4", "delta_g", "e_TV", "e_TTV", "e_VTV", "forward"]
    if args.converge:
        header.append("slope")
    rows = [",".join(header)]
    system = dynamics.harmonic_oscillator()
    state0 = dynamics.default_initial_state(system)
    t_final = 2 * math.pi
    h_list = [t_final / 2**k for k in range(5, 10)]
    for alpha in alphas:
        drifts = construct.zero_dg_symmetric_drifts(6, alpha)
        scheme = construct.velocity_from_drifts(
            drifts, label=f"zero-dg alpha={alpha:.17g} n=6"
        )
        path = os.path.join(args.out_dir, f"zero-dg-alpha-{alpha:.6g}.json")
        save_scheme(scheme, path)
        ec = error_coefficients(scheme)
        row = [
            repr(alpha),
            repr(drifts[2]),
            repr(drifts[3]),
            repr(float(delta_g(scheme))),
            repr(float(ec.e_TV)),
            repr(float(ec.e_TTV)),
            repr(float(ec.e_VTV)),
            str(scheme.is_forward()).lower(),
        ]
        if args.converge:
            rep = dynamics.convergence_study(scheme, system, state0, t_final, h_list)
            row.append(repr(rep.slope))
        rows.append(",".join(row))
    summary = os.path.join(args.out_dir, "summary.csv")
    atomic_write_text(summary, "\n".join(rows) + "\n")
    sys.stdout.write(f"wrote {len(alphas)} schemes and {summary}\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitkit",
        description="Analyze and synthesize operator-splitting symplectic integrators.",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help="seed for any sampling a command performs (fixed default for reproducibility)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="error coefficients, cubic sums and bounds of a scheme")
    p.add_argument("scheme", help="scheme JSON file")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument(
        "--mode",
        choices=("auto", "rational", "float"),
        default="auto",
        help="numeric mode (auto: rational when all coefficients are exact)",
    )
    p.add_argument("-o", "--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="construct a fourth-order scheme analytically")
    p.add_argument(
        "--family",
        required=True,
        choices=("zero-dg", "gradient-velocity", "gradient-position", "forest-ruth"),
    )
    p.add_argument("--alpha", type=float, default=0.0, help="zero-dg family parameter")
    p.add_argument("--n", type=int, default=6, help="number of factor pairs (zero-dg)")
    p.add_argument(
        "--ratios",
        help="comma list of interior pair ratios for general even-n zero-dg sets",
    )
    p.add_argument("--t", help="comma list of drift coefficients (gradient-velocity)")
    p.add_argument("--v", help="comma list of kick coefficients (gradient-position)")
    p.add_argument("--placement", choices=construct.PLACEMENTS, default="central")
    p.add_argument("--prune", action="store_true", help="drop zero-coefficient factors")
    p.add_argument("-o", "--out", required=True, help="output scheme JSON file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="check formulas against the exact expansion oracle")
    p.add_argument("scheme", help="scheme JSON file")
    p.add_argument(
        "--float",
        action="store_true",
        help="toleranced comparison for schemes with float coefficients",
    )
    p.add_argument("--tol", type=float, default=1e-12, help="float-mode tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "converge",
        help="measure the empirical convergence order",
        description="Run the scheme at h0/2^k for k < levels and fit the "
        "log-log error slope. CSV columns: h, error, energy_drift; the "
        "fitted slope is appended as a trailing comment line.",
    )
    p.add_argument("scheme", help="scheme JSON file")
    p.add_argument("--system", required=True, help="harmonic, pendulum, or kepler")
    p.add_argument("--h0", type=float, default=0.1, help="largest step size")
    p.add_argument("--levels", type=int, default=6, help="number of halvings of h0")
    p.add_argument(
        "--t-final",
        type=float,
        default=2 * math.pi,
        help="integration time (step counts are rounded so steps divide it)",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("sweep", help="batch-construct a family over a parameter grid")
    p.add_argument("--family", required=True, help="only zero-dg is sweepable")
    p.add_argument(
        "--alpha-range", required=True, help="grid as start:stop:step (inclusive)"
    )
    p.add_argument("--out-dir", required=True)
    p.add_argument(
        "--converge",
        action="store_true",
        help="add a measured harmonic-oscillator slope column to the summary",
    )
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except SplitkitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
