"""Splitting schemes and their closed-form error-coefficient sums.

A scheme is the ordered factorization ``prod_i exp(t_i*h*T) * exp(v_i*h*V)``
(velocity kind; the position kind mirrors the pair order).  Coefficients may
be exact rationals (``int``/``Fraction``) or floats; all operations keep
exact inputs exact and fall back to IEEE doubles otherwise.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import PreconditionViolated, SchemeParseError

Scalar = Union[int, float, Fraction]

VELOCITY = "velocity"
POSITION = "position"
KINDS = (VELOCITY, POSITION)

#: Relative/absolute tolerance for scalar comparison when floats are involved.
REL_TOL = 1e-12

HALF = Fraction(1, 2)
SIXTH = Fraction(1, 6)


def is_exact(x: Scalar) -> bool:
    """True for scalars carrying no rounding (ints and Fractions)."""
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def exactify(x: Scalar) -> Scalar:
    """Promote exact ints to Fraction so true division stays exact."""
    return Fraction(x) if is_exact(x) else x


def all_exact(values: Iterable[Scalar]) -> bool:
    return all(is_exact(x) for x in values)


def scalars_close(a: Scalar, b: Scalar, tol: float = REL_TOL) -> bool:
    """Exact comparison when both sides are exact, toleranced otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=tol, abs_tol=tol)


def parse_number(x) -> Scalar:
    """Accept a JSON number or an exact "p/q" string."""
    if isinstance(x, bool):
        raise SchemeParseError(f"expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemeParseError(f"cannot parse number {x!r}: {exc}") from None
    raise SchemeParseError(f"expected a number, got {x!r}")


def format_number(x: Scalar):
    """JSON-ready form: exact values as int or "p/q" string, floats as-is."""
    if is_exact(x):
        f = Fraction(x)
        if f.denominator == 1:
            return int(f)
        return f"{f.numerator}/{f.denominator}"
    return float(x)


@dataclass(frozen=True)
class GradientTerm:
    """A coefficient of the gradient generator attached to kick ``index`` (1-based)."""

    index: int
    c: Scalar


@dataclass(frozen=True)
class SplittingScheme:
    """An ordered operator factorization with drift (t) and kick (v) coefficients.

    ``kind="velocity"`` expands as ``prod_i e^{t_i h T} e^{v_i h V}`` and by
    convention has ``t[0] == 0`` so the first applied factor is a kick;
    ``kind="position"`` mirrors the pair order with ``v[0] == 0``.  The
    leading zero is stored explicitly so indices match the usual 1-based
    operator counting.  ``gradient`` attaches coefficients of the
    ``[V,[T,V]]`` generator to individual kicks (h^3 scaling).
    """

    kind: str
    t: tuple
    v: tuple
    gradient: tuple = ()
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "t", tuple(self.t))
        object.__setattr__(self, "v", tuple(self.v))
        if len(self.t) != len(self.v) or len(self.t) < 1:
            raise ValueError(
                f"t and v must have equal length >= 1, got {len(self.t)} and {len(self.v)}"
            )
        terms = []
        for g in self.gradient:
            if not isinstance(g, GradientTerm):
                g = GradientTerm(int(g[0]), g[1])
            if not 1 <= g.index <= len(self.t):
                raise ValueError(f"gradient index {g.index} outside 1..{len(self.t)}")
            terms.append(g)
        object.__setattr__(self, "gradient", tuple(terms))

    @property
    def n(self) -> int:
        return len(self.t)

    def is_exact(self) -> bool:
        return (
            all_exact(self.t)
            and all_exact(self.v)
            and all_exact(g.c for g in self.gradient)
        )

    def is_normalized(self, tol: float = REL_TOL) -> bool:
        return scalars_close(sum(self.t), 1, tol) and scalars_close(sum(self.v), 1, tol)

    def gradient_total(self) -> Scalar:
        return sum((g.c for g in self.gradient), 0)

    def gradient_at(self, index: int) -> Scalar:
        """Summed gradient coefficient attached to kick ``index`` (1-based)."""
        return sum((g.c for g in self.gradient if g.index == index), 0)

    def without_gradient(self) -> "SplittingScheme":
        return replace(self, gradient=())

    def with_label(self, label: str) -> "SplittingScheme":
        return replace(self, label=label)

    def as_float(self) -> "SplittingScheme":
        return SplittingScheme(
            self.kind,
            tuple(float(x) for x in self.t),
            tuple(float(x) for x in self.v),
            tuple(GradientTerm(g.index, float(g.c)) for g in self.gradient),
            self.label,
        )

    def as_exact(self) -> "SplittingScheme":
        """Convert every coefficient to an exact rational (floats exactly)."""
        return SplittingScheme(
            self.kind,
            tuple(Fraction(x) for x in self.t),
            tuple(Fraction(x) for x in self.v),
            tuple(GradientTerm(g.index, Fraction(g.c)) for g in self.gradient),
            self.label,
        )

    def is_forward(self) -> bool:
        """True when every operator coefficient is nonnegative."""
        return all(float(x) >= 0 for x in self.t) and all(
            float(x) >= 0 for x in self.v
        )


@dataclass(frozen=True)
class ErrorCoefficients:
    """Leading exponent coefficients of the expanded product.

    ``e_T``/``e_V`` multiply the generators, ``e_TV`` the commutator [T,V],
    ``e_TTV`` and ``e_VTV`` the two degree-3 commutators [T,[T,V]] and
    [V,[T,V]].
    """

    e_T: Scalar
    e_V: Scalar
    e_TV: Scalar
    e_TTV: Scalar
    e_VTV: Scalar

    def as_tuple(self) -> tuple:
        return (self.e_T, self.e_V, self.e_TV, self.e_TTV, self.e_VTV)


@dataclass(frozen=True)
class PartialSums:
    """Cumulative drift sums s_0..s_N and tail kick sums u_1..u_{N+1}.

    ``s[i]`` is the sum of the first i drift coefficients (s[0] = 0);
    ``u[i-1]`` is the sum of kick coefficients from i to N (u[-1] = 0).
    """

    s: tuple
    u: tuple


def partial_sums(scheme: SplittingScheme) -> PartialSums:
    """Cumulative drift sums and tail kick sums of a scheme."""
    s = [0]
    for ti in scheme.t:
        s.append(s[-1] + ti)
    u = [0]
    for vi in reversed(scheme.v):
        u.append(u[-1] + vi)
    u.reverse()
    return PartialSums(s=tuple(s), u=tuple(u))


def _velocity_form_coefficients(t: Sequence[Scalar], v: Sequence[Scalar]) -> tuple:
    """Exponent coefficients of ``prod_i e^{t_i T} e^{v_i V}``.

    The sums reduce to the familiar normalized expressions when
    sum(t) = sum(v) = 1 but are written so they stay exact for arbitrary
    sums (the extra tau/nu factors restore homogeneity).
    """
    n = len(t)
    tau = sum(t)
    nu = sum(v)
    s = [0]
    for ti in t:
        s.append(s[-1] + ti)
    u = [0] * (n + 1)
    acc = 0
    for i in range(n - 1, -1, -1):
        acc = acc + v[i]
        u[i] = acc
    e_tv = sum(t[i] * u[i] for i in range(n)) - HALF * tau * nu
    e_ttv = (
        HALF * sum(t[i] * (s[i + 1] + s[i]) * u[i] for i in range(n))
        - SIXTH * tau * tau * nu
        - HALF * tau * e_tv
    )
    e_vtv = (
        SIXTH * tau * nu * nu
        + HALF * nu * e_tv
        - HALF * sum(t[i] * u[i] * u[i] for i in range(n))
    )
    return tau, nu, e_tv, e_ttv, e_vtv


def error_coefficients(
    scheme: SplittingScheme, include_gradient: bool = True
) -> ErrorCoefficients:
    """Evaluate the closed-form error-coefficient sums of a scheme.

    For the position kind, the sums are evaluated on the role-swapped
    sequences and mapped back through the operator interchange
    (e_TV -> -e_TV, e_TTV -> -e_VTV, e_VTV -> -e_TTV).  Gradient terms add
    directly to e_VTV since the gradient generator is the [V,[T,V]] basis
    element (central at this truncation order); set ``include_gradient=False``
    to get the coefficients of the plain T/V product.
    """
    if scheme.kind == VELOCITY:
        e_t, e_v, e_tv, e_ttv, e_vtv = _velocity_form_coefficients(scheme.t, scheme.v)
    else:
        e_v, e_t, m_tv, m_ttv, m_vtv = _velocity_form_coefficients(scheme.v, scheme.t)
        e_tv, e_ttv, e_vtv = -m_tv, -m_vtv, -m_ttv
    if include_gradient and scheme.gradient:
        e_vtv = e_vtv + scheme.gradient_total()
    return ErrorCoefficients(e_t, e_v, e_tv, e_ttv, e_vtv)


def delta_g(scheme: SplittingScheme) -> Scalar:
    """Cubic drift sum: sum of t_i**3."""
    return sum(ti**3 for ti in scheme.t)


def delta_g_prime(scheme: SplittingScheme) -> Scalar:
    """Cubic kick sum: sum of v_i**3."""
    return sum(vi**3 for vi in scheme.v)


def g_sum(scheme: SplittingScheme) -> Scalar:
    """Suzuki sum g = sum_i s_i s_{i-1} (s_i - s_{i-1}).

    Requires a normalized drift sum (s_N = 1); equals (1 - delta_g)/3.
    """
    s_total = sum(scheme.t)
    if not scalars_close(s_total, 1):
        raise PreconditionViolated(f"g_sum requires sum(t) = 1, got {s_total}")
    ps = partial_sums(scheme)
    return sum(
        ps.s[i] * ps.s[i - 1] * (ps.s[i] - ps.s[i - 1]) for i in range(1, scheme.n + 1)
    )


def dual(scheme: SplittingScheme) -> SplittingScheme:
    """Interchange of operator roles: swaps kind and the t/v sequences.

    The dual's coefficients relate to the original's by
    (e_T, e_V, e_TV, e_TTV, e_VTV) -> (e_V, e_T, -e_TV, -e_VTV, -e_TTV).
    Gradient terms attach to kicks and have no counterpart after the swap.
    """
    if scheme.gradient:
        raise ValueError("dual is undefined for schemes with gradient terms")
    other = POSITION if scheme.kind == VELOCITY else VELOCITY
    label = f"dual of {scheme.label}" if scheme.label else None
    return SplittingScheme(other, scheme.v, scheme.t, (), label)


def reversed_scheme(scheme: SplittingScheme) -> SplittingScheme:
    """The scheme whose operator word is the original read right-to-left."""
    other = POSITION if scheme.kind == VELOCITY else VELOCITY
    n = scheme.n
    grads = tuple(GradientTerm(n + 1 - g.index, g.c) for g in scheme.gradient)
    return SplittingScheme(other, scheme.t[::-1], scheme.v[::-1], grads, scheme.label)


def factor_word(scheme: SplittingScheme) -> list:
    """The scheme as a factor list in application order.

    Each entry is ("T", coeff, 0) or ("V", coeff, gradient_coeff); the first
    entry is the first factor applied to a state.
    """
    word = []
    for i in range(scheme.n):
        d = ("T", scheme.t[i], 0)
        k = ("V", scheme.v[i], scheme.gradient_at(i + 1))
        word.extend((d, k) if scheme.kind == VELOCITY else (k, d))
    return word


def prune_word(word: Iterable[tuple]) -> list:
    """Drop identity factors and merge adjacent factors of the same generator."""
    out = []
    for gen, c, gc in word:
        if scalars_close(c, 0) and scalars_close(gc, 0):
            continue
        if out and out[-1][0] == gen:
            prev = out.pop()
            out.append((gen, prev[1] + c, prev[2] + gc))
        else:
            out.append((gen, c, gc))
    return out


def word_to_scheme(word: Sequence[tuple], kind: str, label=None) -> SplittingScheme:
    """Repack an alternating factor word into a scheme of the given kind."""
    first = "T" if kind == VELOCITY else "V"
    factors = list(word)
    if factors and factors[0][0] != first:
        factors.insert(0, (first, 0, 0))
    t, v, grads = [], [], []
    i = 0
    pair = 1
    while i < len(factors):
        gen, c, gc = factors[i]
        nxt = factors[i + 1] if i + 1 < len(factors) else None
        if nxt is not None and nxt[0] == gen:
            raise ValueError("factor word is not alternating")
        if kind == VELOCITY:
            t.append(c)
            kc, kg = (nxt[1], nxt[2]) if nxt else (0, 0)
            v.append(kc)
            if not scalars_close(kg, 0):
                grads.append(GradientTerm(pair, kg))
        else:
            v.append(c)
            if not scalars_close(gc, 0):
                grads.append(GradientTerm(pair, gc))
            t.append(nxt[1] if nxt else 0)
        i += 2
        pair += 1
    return SplittingScheme(kind, tuple(t), tuple(v), tuple(grads), label)


def is_symmetric(scheme: SplittingScheme) -> bool:
    """True iff the operator word is a palindrome (gradient terms included)."""
    word = prune_word(factor_word(scheme))
    for f, b in zip(word, reversed(word)):
        if f[0] != b[0]:
            return False
        if not (scalars_close(f[1], b[1]) and scalars_close(f[2], b[2])):
            return False
    return True


# ---------------------------------------------------------------------------
# scheme document format
# ---------------------------------------------------------------------------

def scheme_to_dict(scheme: SplittingScheme) -> dict:
    doc = {
        "kind": scheme.kind,
        "t": [format_number(x) for x in scheme.t],
        "v": [format_number(x) for x in scheme.v],
    }
    if scheme.gradient:
        doc["gradient"] = [
            {"index": g.index, "c": format_number(g.c)} for g in scheme.gradient
        ]
    if scheme.label is not None:
        doc["label"] = scheme.label
    return doc


def scheme_from_dict(doc: dict) -> SplittingScheme:
    if not isinstance(doc, dict):
        raise SchemeParseError(f"scheme document must be an object, got {type(doc).__name__}")
    try:
        kind = doc["kind"]
        t_raw = doc["t"]
        v_raw = doc["v"]
    except KeyError as exc:
        raise SchemeParseError(f"missing required key {exc.args[0]!r}") from None
    if kind not in KINDS:
        raise SchemeParseError(f"kind must be one of {KINDS}, got {kind!r}")
    if not isinstance(t_raw, list) or not isinstance(v_raw, list):
        raise SchemeParseError('"t" and "v" must be arrays of numbers')
    t = tuple(parse_number(x) for x in t_raw)
    v = tuple(parse_number(x) for x in v_raw)
    grads = []
    for entry in doc.get("gradient", ()):
        try:
            grads.append(GradientTerm(int(entry["index"]), parse_number(entry["c"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemeParseError(f"bad gradient entry {entry!r}: {exc}") from None
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise SchemeParseError("label must be a string")
    try:
        return SplittingScheme(kind, t, v, tuple(grads), label)
    except ValueError as exc:
        raise SchemeParseError(str(exc)) from None


def loads_scheme(text: str) -> SplittingScheme:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemeParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scheme_from_dict(doc)


def load_scheme(path) -> SplittingScheme:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads_scheme(text)
    except SchemeParseError as exc:
        raise SchemeParseError(f"{path}: {exc}") from None


def dumps_scheme(scheme: SplittingScheme) -> str:
    return json.dumps(scheme_to_dict(scheme), indent=2) + "\n"


def atomic_write_text(path, text: str):
    """Write via a temp file and rename so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_scheme(scheme: SplittingScheme, path):
    atomic_write_text(path, dumps_scheme(scheme))
