"""Sharp bounds on the degree-3 error coefficients and correctability checks.

The kick tail sums enter the third-order coefficient through a quadratic
form; minimizing it under the two linear constraints gives an exact bound on
e_VTV in terms of the drift coefficients alone (Part A), with a mirrored
statement for kick coefficients (Part B).  Both come with a degenerate
single-drift limit and quantitative corollaries recovering the classic
no-go results for positive-coefficient schemes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (
    BoundViolation,
    DegenerateG,
    NegativeG,
    PreconditionViolated,
)
from .scheme import (
    HALF,
    SIXTH,
    VELOCITY,
    POSITION,
    ErrorCoefficients,
    Scalar,
    SplittingScheme,
    all_exact,
    delta_g,
    delta_g_prime,
    error_coefficients,
    exactify,
    format_number,
    scalars_close,
)

#: Allowed bound violation in float mode (accumulated rounding in cubic sums).
VIOLATION_TOL = 1e-10

_Q112 = Fraction(1, 12)
_Q124 = Fraction(1, 24)


@dataclass(frozen=True)
class LagrangeSolution:
    """Multipliers and minimum of the constrained kick quadratic form."""

    lambda1: Scalar
    lambda2: Scalar
    g: Scalar
    f_min: Scalar


@dataclass(frozen=True)
class TheoremReport:
    """Machine-checkable record of one bound evaluation.

    ``gap`` is signed so nonnegative means the bound holds; ``degenerate``
    flags the single-drift (cubic sum = 1) limit where the quadratic form
    collapses and the third-order drift coefficient is forced.
    """

    part: str
    bound_rhs: Scalar
    actual_lhs: Scalar
    gap: Scalar
    degenerate: bool
    correctability_residual: Scalar
    corollary_bound: Optional[Scalar] = None
    delta_g: Scalar = 0
    rearranged_lhs: Scalar = 0
    rearranged_rhs: Scalar = 0
    satisfied: bool = True
    tolerance: float = 0.0

    def to_dict(self) -> dict:
        doc = {
            "part": self.part,
            "bound_rhs": format_number(self.bound_rhs),
            "actual_lhs": format_number(self.actual_lhs),
            "gap": format_number(self.gap),
            "degenerate": self.degenerate,
            "correctability_residual": format_number(self.correctability_residual),
            "corollary_bound": None
            if self.corollary_bound is None
            else format_number(self.corollary_bound),
            "delta_g": format_number(self.delta_g),
            "rearranged_lhs": format_number(self.rearranged_lhs),
            "rearranged_rhs": format_number(self.rearranged_rhs),
            "satisfied": self.satisfied,
            "tolerance": self.tolerance,
        }
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _tolerance_for(*values) -> float:
    return 0.0 if all_exact(values) else VIOLATION_TOL


def quadratic_minimum(e_TV: Scalar, e_TTV: Scalar, g: Scalar) -> LagrangeSolution:
    """Constrained minimum of the kick quadratic form for given targets.

    The multipliers solve lambda1 + lambda2 = 1/2 + e_TV and
    lambda1 + lambda2 + g*lambda2 = 1/3 + e_TV + 2*e_TTV; the minimum is
    (1/2 + e_TV)^2/2 + (2*e_TTV - 1/6)^2/(2g).
    """
    if g == 0:
        raise DegenerateG("quadratic form is degenerate at g = 0")
    if g < 0:
        raise NegativeG(f"g must be positive, got {g}")
    lambda2 = (2 * e_TTV - SIXTH) / g
    lambda1 = HALF + e_TV - lambda2
    f_min = HALF * (HALF + e_TV) ** 2 + (2 * e_TTV - SIXTH) ** 2 / (2 * g)
    return LagrangeSolution(lambda1=lambda1, lambda2=lambda2, g=g, f_min=f_min)


def correctability_residual(ec: ErrorCoefficients) -> Scalar:
    """e_VTV + e_TV^2/2 - e_TTV; zero iff correctable at third order."""
    return ec.e_VTV + HALF * ec.e_TV**2 - ec.e_TTV


def _check_part_preconditions(scheme: SplittingScheme, part: str):
    if part == "A":
        if scheme.kind != VELOCITY:
            raise PreconditionViolated("Part A applies to velocity-kind schemes")
        coeffs = scheme.t
        name = "t"
    else:
        if scheme.kind != POSITION:
            raise PreconditionViolated("Part B applies to position-kind schemes")
        coeffs = scheme.v
        name = "v"
    if not scalars_close(coeffs[0], 0):
        raise PreconditionViolated(f"Part {part} requires {name}[0] = 0, got {coeffs[0]}")
    for i, c in enumerate(coeffs[1:], start=2):
        if not float(c) > 0:
            raise PreconditionViolated(
                f"Part {part} requires {name}_i > 0 for i > 1; {name}_{i} = {c}"
            )
    if not scheme.is_normalized():
        raise PreconditionViolated(
            f"Part {part} requires a normalized scheme (sum t = sum v = 1)"
        )


def bound_part_a(scheme: SplittingScheme) -> TheoremReport:
    """Upper bound on e_VTV for velocity schemes with positive drifts.

    e_VTV <= 1/24 - e_TV^2/2 - (6/(1-dg))(e_TTV - 1/12)^2 with dg the cubic
    drift sum; gradient terms are excluded since the bound governs the plain
    T/V product.  At dg = 1 the bound degenerates to e_VTV <= 1/24 - e_TV^2/2
    with e_TTV forced to 1/12 by the constraint sums.
    """
    _check_part_preconditions(scheme, "A")
    ec = error_coefficients(scheme, include_gradient=False)
    dg = exactify(delta_g(scheme))
    tol = _tolerance_for(dg, *ec.as_tuple())
    degenerate = scalars_close(dg, 1)
    if degenerate:
        bound_rhs = _Q124 - HALF * ec.e_TV**2
        rearranged_rhs = -dg / 24
    else:
        bound_rhs = _Q124 - HALF * ec.e_TV**2 - (6 / (1 - dg)) * (ec.e_TTV - _Q112) ** 2
        rearranged_rhs = -dg / 24 - (6 / (1 - dg)) * (ec.e_TTV - dg * _Q112) ** 2
    actual = ec.e_VTV
    gap = bound_rhs - actual
    residual = correctability_residual(ec)
    corollary = None
    if not degenerate and scalars_close(ec.e_TV, 0, 1e-10) and scalars_close(
        ec.e_TTV, 0, 1e-10
    ):
        corollary = -dg / (24 * (1 - dg))
    return TheoremReport(
        part="A",
        bound_rhs=bound_rhs,
        actual_lhs=actual,
        gap=gap,
        degenerate=degenerate,
        correctability_residual=residual,
        corollary_bound=corollary,
        delta_g=dg,
        rearranged_lhs=residual,
        rearranged_rhs=rearranged_rhs,
        satisfied=bool(float(gap) >= -tol),
        tolerance=tol,
    )


def bound_part_b(scheme: SplittingScheme) -> TheoremReport:
    """Lower bound on e_TTV for position schemes with positive kicks.

    e_TTV >= -1/24 + e_TV^2/2 + (6/(1-dg'))(e_VTV + 1/12)^2 with dg' the
    cubic kick sum; the degenerate dg' = 1 limit forces e_VTV = -1/12 and
    leaves e_TTV >= -1/24 + e_TV^2/2.
    """
    _check_part_preconditions(scheme, "B")
    ec = error_coefficients(scheme, include_gradient=False)
    dgp = exactify(delta_g_prime(scheme))
    tol = _tolerance_for(dgp, *ec.as_tuple())
    degenerate = scalars_close(dgp, 1)
    if degenerate:
        bound_rhs = -_Q124 + HALF * ec.e_TV**2
        rearranged_rhs = dgp / 24
    else:
        bound_rhs = -_Q124 + HALF * ec.e_TV**2 + (6 / (1 - dgp)) * (ec.e_VTV + _Q112) ** 2
        rearranged_rhs = dgp / 24 + (6 / (1 - dgp)) * (ec.e_VTV + dgp * _Q112) ** 2
    actual = ec.e_TTV
    gap = actual - bound_rhs
    # The B-side rearranged form bounds e_TTV - e_TV^2/2 - e_VTV from below
    # by a strictly positive quantity; report that orientation (the raw
    # third-order residual itself is interchange-invariant and negative).
    residual = -correctability_residual(ec)
    corollary = None
    if not degenerate and scalars_close(ec.e_TV, 0, 1e-10) and scalars_close(
        ec.e_VTV, 0, 1e-10
    ):
        corollary = dgp / (24 * (1 - dgp))
    return TheoremReport(
        part="B",
        bound_rhs=bound_rhs,
        actual_lhs=actual,
        gap=gap,
        degenerate=degenerate,
        correctability_residual=residual,
        corollary_bound=corollary,
        delta_g=dgp,
        rearranged_lhs=residual,
        rearranged_rhs=rearranged_rhs,
        satisfied=bool(float(gap) >= -tol),
        tolerance=tol,
    )


def corollary_gap(scheme: SplittingScheme, which: str = "A") -> Scalar:
    """Quantitative no-go bound when the lower commutator coefficients vanish.

    Part A (e_TV = e_TTV = 0): returns -dg/(24(1-dg)) and checks
    e_VTV <= it; Part B (e_TV = e_VTV = 0): returns dg'/(24(1-dg')) and
    checks e_TTV >= it.  Gradient terms are excluded.  The bound value is
    meaningful for mixed-sign coefficient sets too (stationary constructions
    attain it with equality); a genuine violation raises BoundViolation.
    """
    if which not in ("A", "B"):
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    ec = error_coefficients(scheme, include_gradient=False)
    tol = _tolerance_for(*ec.as_tuple())
    ztol = max(tol, 1e-10) if tol else 0
    if which == "A":
        if not (scalars_close(ec.e_TV, 0, 1e-10) and scalars_close(ec.e_TTV, 0, 1e-10)):
            raise PreconditionViolated(
                f"corollary A needs e_TV = e_TTV = 0, got {ec.e_TV}, {ec.e_TTV}"
            )
        dg = exactify(delta_g(scheme))
        if scalars_close(dg, 1):
            raise DegenerateG("corollary A is undefined at cubic drift sum 1")
        bound = -dg / (24 * (1 - dg))
        if float(ec.e_VTV) > float(bound) + max(ztol, VIOLATION_TOL):
            raise BoundViolation(f"e_VTV = {ec.e_VTV} exceeds corollary bound {bound}")
        return bound
    if not (scalars_close(ec.e_TV, 0, 1e-10) and scalars_close(ec.e_VTV, 0, 1e-10)):
        raise PreconditionViolated(
            f"corollary B needs e_TV = e_VTV = 0, got {ec.e_TV}, {ec.e_VTV}"
        )
    dgp = exactify(delta_g_prime(scheme))
    if scalars_close(dgp, 1):
        raise DegenerateG("corollary B is undefined at cubic kick sum 1")
    bound = dgp / (24 * (1 - dgp))
    if float(ec.e_TTV) < float(bound) - max(ztol, VIOLATION_TOL):
        raise BoundViolation(f"e_TTV = {ec.e_TTV} below corollary bound {bound}")
    return bound
