"""Exact symbolic products in the step-3 free Lie algebra on two generators.

Serves as the tolerance-free oracle for the closed-form coefficient sums:
a scheme's factor word is folded with the degree-3 Baker-Campbell-Hausdorff
formula, which is exact here because every bracket of total degree > 3
vanishes in the truncated algebra.  All scalars are Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import IrrationalCoefficient
from .scheme import SplittingScheme, factor_word, is_exact

_ZERO = Fraction(0)
_HALF = Fraction(1, 2)
_TWELFTH = Fraction(1, 12)


@dataclass(frozen=True)
class LieElement:
    """Coordinates over the ordered basis (T, V, [T,V], [T,[T,V]], [V,[T,V]])."""

    T: Fraction = _ZERO
    V: Fraction = _ZERO
    TV: Fraction = _ZERO
    TTV: Fraction = _ZERO
    VTV: Fraction = _ZERO

    def __add__(self, other: "LieElement") -> "LieElement":
        return LieElement(
            self.T + other.T,
            self.V + other.V,
            self.TV + other.TV,
            self.TTV + other.TTV,
            self.VTV + other.VTV,
        )

    def __sub__(self, other: "LieElement") -> "LieElement":
        return LieElement(
            self.T - other.T,
            self.V - other.V,
            self.TV - other.TV,
            self.TTV - other.TTV,
            self.VTV - other.VTV,
        )

    def __neg__(self) -> "LieElement":
        return self.scale(-1)

    def scale(self, k) -> "LieElement":
        k = Fraction(k)
        return LieElement(k * self.T, k * self.V, k * self.TV, k * self.TTV, k * self.VTV)

    def coordinates(self) -> tuple:
        return (self.T, self.V, self.TV, self.TTV, self.VTV)

    def is_zero(self) -> bool:
        return not any(self.coordinates())


ZERO = LieElement()
T = LieElement(T=Fraction(1))
V = LieElement(V=Fraction(1))
E_TV = LieElement(TV=Fraction(1))
E_TTV = LieElement(TTV=Fraction(1))
E_VTV = LieElement(VTV=Fraction(1))


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """Bilinear bracket with [T,V]=E_TV, [T,E_TV]=E_TTV, [V,E_TV]=E_VTV.

    Brackets of total degree > 3 are truncated to zero, which is exact for
    reading off the five leading coordinates: the grading means higher
    elements can never feed back into lower degrees.
    """
    return LieElement(
        TV=x.T * y.V - x.V * y.T,
        TTV=x.T * y.TV - x.TV * y.T,
        VTV=x.V * y.TV - x.TV * y.V,
    )


def bch_product(x: LieElement, y: LieElement) -> LieElement:
    """log(e^x e^y) in the truncated algebra.

    The degree-3 series x + y + [x,y]/2 + [x,[x,y]]/12 - [y,[x,y]]/12 is the
    whole story here, so the product is exactly associative.
    """
    b = bracket(x, y)
    return (
        x
        + y
        + b.scale(_HALF)
        + bracket(x, b).scale(_TWELFTH)
        - bracket(y, b).scale(_TWELFTH)
    )


def _exact_scalar(x) -> Fraction:
    if is_exact(x):
        return Fraction(x)
    xf = float(x)
    if not math.isfinite(xf):
        raise IrrationalCoefficient(f"cannot represent {x!r} exactly")
    return Fraction(xf)


def expand_word(word, merge_gradient: bool = True) -> LieElement:
    """Fold the BCH product over a factor word in application order."""
    z = ZERO
    for gen, c, gc in word:
        c = _exact_scalar(c)
        gc = _exact_scalar(gc)
        if gen == "T":
            factor = LieElement(T=c)
            z = bch_product(z, factor)
        else:
            if merge_gradient:
                z = bch_product(z, LieElement(V=c, VTV=gc))
            else:
                z = bch_product(z, LieElement(V=c))
                if gc:
                    z = bch_product(z, LieElement(VTV=gc))
    return z


def expand_scheme(
    scheme: SplittingScheme,
    merge_gradient: bool = True,
    require_exact_input: bool = False,
) -> LieElement:
    """Exact exponent coordinates of a scheme's operator product.

    Float coefficients are converted to their exact binary rational value;
    pass ``require_exact_input=True`` to insist on int/Fraction coefficients
    instead (useful when floats would hide an irrational intent).
    ``merge_gradient=False`` emits each gradient term as its own factor;
    since the gradient generator is central at this order the two paths
    agree, which is itself a tested property.
    """
    if require_exact_input and not scheme.is_exact():
        raise IrrationalCoefficient(
            "scheme has float coefficients but exact input was required"
        )
    return expand_word(factor_word(scheme), merge_gradient=merge_gradient)
