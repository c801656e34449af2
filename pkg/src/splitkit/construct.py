"""Analytic constructors for fourth-order splitting schemes.

Three families: kicks derived from a symmetric drift set (stationary point
of the kick quadratic form, saturating the sharp bound), symmetric drift
sets with vanishing cubic sum (genuinely fourth-order T/V-only schemes), and
gradient schemes that cancel the remaining [V,[T,V]] coefficient with an
explicit gradient-generator term on the kicks.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DegenerateG,
    NotSymmetric,
    PreconditionViolated,
    RadicandNegative,
    SingularAlpha,
    UnsupportedN,
)
from .scheme import (
    HALF,
    POSITION,
    VELOCITY,
    GradientTerm,
    Scalar,
    SplittingScheme,
    all_exact,
    exactify,
    factor_word,
    prune_word,
    scalars_close,
    word_to_scheme,
)

PLACEMENTS = ("central", "split")


def _is_palindromic_tail(seq: Sequence[Scalar]) -> bool:
    """True when seq[1:] reads the same in both directions."""
    tail = seq[1:]
    return all(scalars_close(a, b) for a, b in zip(tail, reversed(tail)))


def _check_drift_input(t: Sequence[Scalar], warn_asymmetric: bool):
    if not scalars_close(t[0], 0):
        raise PreconditionViolated(f"first drift coefficient must be 0, got {t[0]}")
    total = sum(t)
    if not scalars_close(total, 1):
        raise PreconditionViolated(f"drift coefficients must sum to 1, got {total}")
    if warn_asymmetric and not _is_palindromic_tail(t):
        warnings.warn(
            "drift set is not left-right symmetric; the construction still "
            "zeroes e_TV and e_TTV but higher-order symmetry is lost",
            NotSymmetric,
            stacklevel=3,
        )


def velocity_from_drifts(
    t: Sequence[Scalar], label: Optional[str] = None
) -> SplittingScheme:
    """Kicks that make the kick quadratic form stationary for given drifts.

    Interior kicks are -lambda2*(t_i + t_{i+1}) with
    lambda2 = -1/(2(1 - dg)), dg the cubic drift sum; the end kicks take the
    remainder.  The result has e_TV = e_TTV = 0 and
    e_VTV = -dg/(24(1 - dg)) exactly, for mixed-sign drift sets too.
    """
    t = tuple(t)
    if len(t) < 2:
        raise PreconditionViolated("need at least two drift coefficients")
    _check_drift_input(t, warn_asymmetric=True)
    dg = exactify(sum(ti**3 for ti in t))
    if scalars_close(dg, 1):
        raise DegenerateG("cubic drift sum is 1; kick coefficients are not defined")
    one = Fraction(1) if all_exact(t) else 1.0
    lam2 = -one / (2 * (1 - dg))
    n = len(t)
    v = [HALF * one + lam2 * (1 - t[1])]
    for i in range(1, n - 1):
        v.append(-lam2 * (t[i] + t[i + 1]))
    v.append(HALF * one + lam2 * (1 - t[n - 1]))
    if label is None:
        label = f"velocity-from-drifts n={n}"
    return SplittingScheme(VELOCITY, t, tuple(v), (), label)


def zero_dg_symmetric_drifts(n: int = 6, alpha: float = 0.0) -> tuple:
    """Closed-form symmetric six-drift set with zero cubic sum.

    Returns (0, a*t3, t3, t4, t3, a*t3) with
    t3 = 1/(2(1+a) - 2^(1/3)(1+a^3)^(1/3)) and t4 = -2^(1/3)(1+a^3)^(1/3)*t3,
    so that the sum is 1 and the cubic sum vanishes.  alpha = 0 recovers the
    classic triple-jump drift set.
    """
    if n != 6:
        raise UnsupportedN(
            f"closed form exists for n = 6 only (got n = {n}); "
            "use zero_dg_drifts_from_ratios for other even sizes"
        )
    a = float(alpha)
    root = _cbrt(2.0) * _cbrt(1.0 + a**3)
    den = 2.0 * (1.0 + a) - root
    if abs(den) < 1e-12:
        raise SingularAlpha(f"denominator vanishes at alpha = {alpha}")
    t3 = 1.0 / den
    t4 = -root * t3
    return (0.0, a * t3, t3, t4, t3, a * t3)


def zero_dg_drifts_from_ratios(ratios: Sequence[float]) -> tuple:
    """Symmetric zero-cubic-sum drift set for n = 2*(len(ratios)+2) drifts.

    Fixes the interior symmetric pairs as multiples of the pair adjacent to
    the middle (ratios r_k, with the adjacent pair itself at ratio 1) and
    solves the two constraints for the remaining scale; the aggregated
    constraint reduces to the same cubic as the six-drift family, so a
    closed form applies for any even size.
    """
    rho = tuple(float(r) for r in ratios) + (1.0,)
    b = sum(rho)
    a3 = sum(r**3 for r in rho)
    root = _cbrt(2.0) * _cbrt(a3)
    den = 2.0 * b - root
    if abs(den) < 1e-12:
        raise SingularAlpha(f"denominator vanishes for ratios {tuple(ratios)}")
    x = 1.0 / den
    pairs = [r * x for r in rho]
    middle = 1.0 - 2.0 * sum(pairs)
    return (0.0, *pairs, middle, *reversed(pairs))


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _place_gradient(
    v: Sequence[Scalar], total: Scalar, placement: str, eligible: Sequence[int]
) -> tuple:
    """Distribute a total gradient coefficient over kicks (1-based indices).

    "central" targets the innermost eligible kick, splitting across the two
    innermost when the eligible count is even; "split" spreads over the
    interior eligible kicks proportionally to their kick coefficients.
    """
    if placement not in PLACEMENTS:
        raise ValueError(f"placement must be one of {PLACEMENTS}, got {placement!r}")
    if scalars_close(total, 0):
        return ()
    if placement == "central":
        m = len(eligible)
        if m % 2 == 1:
            return (GradientTerm(eligible[m // 2], total),)
        lo, hi = eligible[m // 2 - 1], eligible[m // 2]
        return (GradientTerm(lo, total / 2), GradientTerm(hi, total / 2))
    interior = eligible[1:-1]
    if not interior:
        interior = eligible
    weight = sum(v[i - 1] for i in interior)
    if scalars_close(weight, 0):
        raise PreconditionViolated("interior kicks sum to zero; cannot split gradient")
    return tuple(GradientTerm(i, total * v[i - 1] / weight) for i in interior)


def gradient_velocity(
    t: Sequence[Scalar], placement: str = "central"
) -> SplittingScheme:
    """Fourth-order velocity scheme for any symmetric drift set.

    Builds the stationary kicks, then cancels the remaining [V,[T,V]]
    coefficient with gradient terms summing to dg/(24(1-dg)) placed
    symmetrically on the kicks.
    """
    base = velocity_from_drifts(t)
    dg = exactify(sum(ti**3 for ti in base.t))
    total = dg / (24 * (1 - dg))
    eligible = list(range(1, base.n + 1))
    grads = _place_gradient(base.v, total, placement, eligible)
    return SplittingScheme(
        VELOCITY,
        base.t,
        base.v,
        grads,
        f"gradient-velocity n={base.n} placement={placement}",
    )


def gradient_position(
    v: Sequence[Scalar], placement: str = "central"
) -> SplittingScheme:
    """Fourth-order position scheme for any symmetric kick set.

    Drifts are -lambda2*(v_i + v_{i+1}) in the interior with
    lambda2 = -1/(2*sqrt(1 - dg')), dg' the cubic kick sum, and end drifts
    taking the remainder; the plain product then has e_TV = e_TTV = 0 and
    e_VTV = -(1 - sqrt(1 - dg'))/12, which gradient terms on the kicks
    cancel.
    """
    v = tuple(v)
    if len(v) < 2:
        raise PreconditionViolated("need at least two kick coefficients")
    if not scalars_close(v[0], 0):
        raise PreconditionViolated(f"first kick coefficient must be 0, got {v[0]}")
    total_v = sum(v)
    if not scalars_close(total_v, 1):
        raise PreconditionViolated(f"kick coefficients must sum to 1, got {total_v}")
    if not _is_palindromic_tail(v):
        warnings.warn(
            "kick set is not left-right symmetric; higher-order symmetry is lost",
            NotSymmetric,
            stacklevel=2,
        )
    dgp = exactify(sum(vi**3 for vi in v))
    if float(dgp) >= 1:
        raise RadicandNegative(f"cubic kick sum must be < 1, got {dgp}")
    root = _sqrt_keep_exact(1 - dgp)
    lam2 = -1 / (2 * root)
    n = len(v)
    t = [HALF + lam2 * (1 - v[1])]
    for i in range(1, n - 1):
        t.append(-lam2 * (v[i] + v[i + 1]))
    t.append(HALF + lam2 * (1 - v[n - 1]))
    e_vtv = -(1 - root) * Fraction(1, 12)
    eligible = list(range(2, n + 1))
    grads = _place_gradient(v, -e_vtv, placement, eligible)
    return SplittingScheme(
        POSITION, tuple(t), v, grads, f"gradient-position n={n} placement={placement}"
    )


def _sqrt_keep_exact(x):
    """Square root that stays rational when the input is a perfect square."""
    if all_exact((x,)):
        f = Fraction(x)
        if f >= 0:
            pn, pd = math.isqrt(f.numerator), math.isqrt(f.denominator)
            if pn * pn == f.numerator and pd * pd == f.denominator:
                return Fraction(pn, pd)
    return math.sqrt(float(x))


def prune_zero_factors(scheme: SplittingScheme) -> SplittingScheme:
    """Drop identity factors and re-pack, keeping kind and coefficients."""
    word = prune_word(factor_word(scheme))
    return word_to_scheme(word, scheme.kind, scheme.label)


def leapfrog() -> SplittingScheme:
    """Second-order symmetric kick-drift-kick scheme."""
    h = Fraction(1, 2)
    return SplittingScheme(VELOCITY, (0, 1), (h, h), (), "leapfrog")


def forest_ruth() -> SplittingScheme:
    """Classic fourth-order T/V-only scheme (zero cubic drift sum, alpha=0)."""
    scheme = velocity_from_drifts(zero_dg_symmetric_drifts(6, 0.0))
    return prune_zero_factors(scheme).with_label("forest-ruth")


def _third() -> Fraction:
    return Fraction(1, 3)


BUILTIN_SCHEMES = {
    "leapfrog": leapfrog,
    "forest-ruth": forest_ruth,
    "gradient-n4": lambda: gradient_velocity((0, _third(), _third(), _third())),
    "gradient-n4-variant": lambda: gradient_velocity(
        (0, 2 * _third(), -_third(), 2 * _third())
    ),
    "zero-dg-alpha1": lambda: velocity_from_drifts(
        zero_dg_symmetric_drifts(6, 1.0), label="zero-dg alpha=1 n=6"
    ),
    "position-n4": lambda: gradient_position((0, _third(), _third(), _third())),
}


def builtin_scheme(name: str) -> SplittingScheme:
    try:
        factory = BUILTIN_SCHEMES[name]
    except KeyError:
        raise KeyError(
            f"unknown scheme {name!r}; available: {', '.join(sorted(BUILTIN_SCHEMES))}"
        ) from None
    return factory()
