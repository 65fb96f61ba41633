"""Exact arithmetic for a monomial valuation and its blow-up tower.

The ordered value group is Z + Z*sqrt(2), stored as pairs of exact
rationals with sign decided by comparing squares.  Polynomials in x and y
(and t for the discrete-valuation model) are sparse exponent maps over
rationals, so every valuation, membership test, chart transform, and escape
step below is computed without rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction


class ValuationError(ValueError):
    """Invalid input to the valuation laboratory."""


# ---------------------------------------------------------------------------
# the ordered group Z + Z*sqrt(2) (rational coefficients allowed)


@dataclass(frozen=True)
class GroupElement:
    """An exact element ``a + b*sqrt(2)`` of the ordered value group."""

    a: Fraction
    b: Fraction

    @classmethod
    def of(cls, a, b=0) -> "GroupElement":
        return cls(Fraction(a), Fraction(b))

    def sign(self) -> int:
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # mixed signs: compare a^2 with 2 b^2; equality would force a = b = 0
        if a * a == 2 * b * b:
            raise ValuationError("sqrt(2) cannot be rational")
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b)

    def scale(self, r) -> "GroupElement":
        r = Fraction(r)
        return GroupElement(self.a * r, self.b * r)

    def is_positive(self) -> bool:
        return self.sign() > 0

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt2"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}*sqrt2"


GROUP_ZERO = GroupElement.of(0)
GROUP_ONE = GroupElement.of(1)
SQRT2 = GroupElement.of(0, 1)


def has_division_by(g: GroupElement, l: int) -> GroupElement | None:
    """The element ``g / l`` when it stays inside Z + Z*sqrt(2)."""
    a, b = g.a / l, g.b / l
    if a.denominator == 1 and b.denominator == 1:
        return GroupElement(a, b)
    return None


# ---------------------------------------------------------------------------
# sparse polynomials in t, x, y over exact rationals


@dataclass(frozen=True)
class Polynomial:
    """Exponent-map polynomial; keys are ``(e_t, e_x, e_y)``."""

    coeffs: tuple[tuple[tuple[int, int, int], Fraction], ...]

    @classmethod
    def from_dict(cls, d: dict) -> "Polynomial":
        items = tuple(
            sorted((k, Fraction(v)) for k, v in d.items() if Fraction(v) != 0)
        )
        return cls(items)

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls.from_dict({(0, 0, 0): Fraction(c)})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        idx = {"t": 0, "x": 1, "y": 2}[name]
        key = tuple(1 if i == idx else 0 for i in range(3))
        return cls.from_dict({key: 1})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Polynomial") -> "Polynomial":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, Fraction(0)) + v
        return Polynomial.from_dict(d)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple((k, -v) for k, v in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        d: dict = {}
        for k1, v1 in self.coeffs:
            for k2, v2 in other.coeffs:
                k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                d[k] = d.get(k, Fraction(0)) + v1 * v2
        return Polynomial.from_dict(d)

    def uses(self, name: str) -> bool:
        idx = {"t": 0, "x": 1, "y": 2}[name]
        return any(k[idx] for k, _ in self.coeffs)

    def t_order(self) -> int | float:
        """The t-adic order; infinite for the zero polynomial."""
        if self.is_zero():
            return math.inf
        if self.uses("x") or self.uses("y"):
            raise ValuationError("t-order needs a polynomial in t alone")
        return min(k[0] for k, _ in self.coeffs)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for (et, ex, ey), c in self.coeffs:
            factors = []
            if c != 1 or (et, ex, ey) == (0, 0, 0):
                factors.append(str(c))
            for e, name in ((et, "t"), (ex, "x"), (ey, "y")):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)


@dataclass(frozen=True)
class RationalFn:
    """A fraction of polynomials; the denominator is nonzero."""

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero():
            raise ValuationError("zero denominator")

    @classmethod
    def of(cls, num: Polynomial, den: Polynomial | None = None) -> "RationalFn":
        return cls(num, den if den is not None else Polynomial.constant(1))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFn") -> "RationalFn":
        if other.num.is_zero():
            raise ValuationError("division by zero")
        return RationalFn(self.num * other.den, self.den * other.num)

    def t_order(self) -> int | float:
        return self.num.t_order() - self.den.t_order() if not self.is_zero() else math.inf

    def __str__(self) -> str:
        if self.den == Polynomial.constant(1):
            return str(self.num)
        return f"({self.num})/({self.den})"


# ---------------------------------------------------------------------------
# expression parsing: rational coefficients, ^ for powers, / for fractions

_TOKEN = re.compile(r"\s*(?:(\d+)|([txy])|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ValuationError(f"bad character in expression at {text[pos:]!r}")
        number, name, sym = m.groups()
        if number is not None:
            tokens.append(("num", int(number)))
        elif name is not None:
            tokens.append(("var", name))
        else:
            tokens.append(("sym", "^" if sym == "**" else sym))
        pos = m.end()
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expr(self) -> RationalFn:
        value = self.term()
        while self.peek() == ("sym", "+") or self.peek() == ("sym", "-"):
            _, op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFn:
        value = self.unary()
        while self.peek() == ("sym", "*") or self.peek() == ("sym", "/"):
            _, op = self.take()
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self) -> RationalFn:
        negate = False
        while self.peek() in (("sym", "-"), ("sym", "+")):
            _, op = self.take()
            if op == "-":
                negate = not negate
        value = self.power()
        return -value if negate else value

    def power(self) -> RationalFn:
        base = self.atom()
        if self.peek() == ("sym", "^"):
            self.take()
            sign = 1
            while self.peek() in (("sym", "-"), ("sym", "+")):
                _, op = self.take()
                if op == "-":
                    sign = -sign
            kind, val = self.take()
            if kind != "num":
                raise ValuationError("exponent must be an integer")
            exponent = sign * val
            value = RationalFn.of(Polynomial.constant(1))
            for _ in range(abs(exponent)):
                value = value * base
            if exponent < 0:
                value = RationalFn.of(Polynomial.constant(1)) / value
            return value
        return base

    def atom(self) -> RationalFn:
        kind, val = self.take()
        if kind == "num":
            return RationalFn.of(Polynomial.constant(val))
        if kind == "var":
            return RationalFn.of(Polynomial.variable(val))
        if (kind, val) == ("sym", "("):
            inner = self.expr()
            if self.take() != ("sym", ")"):
                raise ValuationError("unbalanced parentheses")
            return inner
        raise ValuationError(f"unexpected token {val!r}")


def parse_rational_fn(text: str) -> RationalFn:
    parser = _Parser(_tokenize(text))
    value = parser.expr()
    if parser.peek() != ("end", ""):
        raise ValuationError(f"trailing input near {parser.peek()!r}")
    return value


def parse_polynomial(text: str) -> Polynomial:
    rf = parse_rational_fn(text)
    if rf.den.coeffs != Polynomial.constant(1).coeffs:
        # a constant denominator folds into the coefficients
        if not rf.den.uses("t") and not rf.den.uses("x") and not rf.den.uses("y"):
            c = rf.den.as_dict()[(0, 0, 0)]
            return Polynomial.from_dict(
                {k: v / c for k, v in rf.num.as_dict().items()}
            )
        raise ValuationError("expected a polynomial, got a genuine fraction")
    return rf.num


# ---------------------------------------------------------------------------
# the monomial valuation v(x^i y^j) = i + j*sqrt(2)


def value(f: Polynomial) -> GroupElement:
    """Minimum of ``i + j*sqrt(2)`` over the monomials present in ``f``."""
    if f.is_zero():
        raise ValuationError("the zero polynomial has no value")
    if f.uses("t"):
        raise ValuationError("the monomial valuation reads polynomials in x, y")
    best: GroupElement | None = None
    for (et, ex, ey), _ in f.coeffs:
        candidate = GroupElement.of(ex, ey)
        if best is None or candidate < best:
            best = candidate
    return best


def value_of_fraction(rf: RationalFn) -> GroupElement:
    return value(rf.num) - value(rf.den)


def rv_membership(rf: RationalFn) -> str:
    """Classify against the valuation ring: sign of the value decides.

    The zero element sits in the maximal ideal (its value is infinite).
    """
    if rf.is_zero():
        return "maximal_ideal"
    s = value_of_fraction(rf).sign()
    if s > 0:
        return "maximal_ideal"
    if s == 0:
        return "unit"
    return "outside"


@dataclass(eq=False)
class MonomialValuation:
    """Convenience wrapper bundling the valuation and membership tests."""

    def value(self, f: Polynomial | str) -> GroupElement:
        if isinstance(f, str):
            f = parse_polynomial(f)
        return value(f)

    def value_of(self, rf: RationalFn | str) -> GroupElement:
        if isinstance(rf, str):
            rf = parse_rational_fn(rf)
        return value_of_fraction(rf)

    def classify(self, rf: RationalFn | str) -> str:
        if isinstance(rf, str):
            rf = parse_rational_fn(rf)
        return rv_membership(rf)


# ---------------------------------------------------------------------------
# the blow-up tower of the valuation's centers


@dataclass(frozen=True)
class BlowupTower:
    """State of the center after ``step`` blow-ups.

    ``beta`` and ``gamma`` are the values of the two chart coordinates; both
    stay strictly positive because sqrt(2) is irrational, so the subtractive
    process never terminates.
    """

    step: int
    word: str
    beta: GroupElement
    gamma: GroupElement

    @classmethod
    def initial(cls) -> "BlowupTower":
        return cls(0, "", GROUP_ONE, SQRT2)

    def advance(self) -> "BlowupTower":
        if self.gamma > self.beta:
            return BlowupTower(
                self.step + 1, self.word + "A", self.beta, self.gamma - self.beta
            )
        if self.beta > self.gamma:
            return BlowupTower(
                self.step + 1, self.word + "B", self.beta - self.gamma, self.gamma
            )
        raise ValuationError("equal center coordinates would make sqrt(2) rational")


@dataclass(frozen=True)
class CenterStep:
    letter: str | None
    beta: GroupElement
    gamma: GroupElement


def center_sequence(n: int) -> list[CenterStep]:
    """Steps 0..n of the subtractive process starting from (1, sqrt(2))."""
    if n < 0:
        raise ValuationError("the number of steps must be non-negative")
    tower = BlowupTower.initial()
    steps = [CenterStep(None, tower.beta, tower.gamma)]
    for _ in range(n):
        tower = tower.advance()
        steps.append(CenterStep(tower.word[-1], tower.beta, tower.gamma))
    return steps


def sqrt2_continued_fraction(n_terms: int) -> list[int]:
    return [1] + [2] * (n_terms - 1) if n_terms > 0 else []


def chart_word_from_continued_fraction(coeffs, length: int) -> str:
    """Chart letters from continued-fraction coefficients.

    Each coefficient contributes a block of equal letters, alternating
    between A-charts and B-charts, starting with A.
    """
    word = []
    letter = "A"
    for c in coeffs:
        word.extend(letter * c)
        letter = "B" if letter == "A" else "A"
        if len(word) >= length:
            break
    return "".join(word[:length])


def minimal_periodicity(word: str, min_repeats: int = 2):
    """Smallest ``(preperiod, period)`` with at least ``min_repeats`` periods."""
    n = len(word)
    for period in range(1, n + 1):
        for pre in range(0, n - min_repeats * period + 1):
            if all(
                word[i] == word[i + period] for i in range(pre, n - period)
            ):
                return (pre, period)
        # no valid preperiod for this period length
    return None


# ---------------------------------------------------------------------------
# lifting points of the discrete-valuation model through the tower


@dataclass(frozen=True)
class DVRPoint:
    """A point of the plane over the local ring at t = 0.

    Both coordinates are rational functions of t with non-negative order.
    """

    a: RationalFn
    b: RationalFn

    @classmethod
    def of(cls, a, b) -> "DVRPoint":
        if isinstance(a, str):
            a = parse_rational_fn(a)
        if isinstance(b, str):
            b = parse_rational_fn(b)
        for coord in (a, b):
            if coord.num.uses("x") or coord.num.uses("y") or coord.den.uses("x") or coord.den.uses("y"):
                raise ValuationError("coordinates must be rational functions of t")
            if not coord.is_zero() and coord.t_order() < 0:
                raise ValuationError("coordinates must have non-negative t-order")
        return cls(a, b)


@dataclass(frozen=True)
class Escaped:
    step: int
    reason: str
    witness: str
    word: str


@dataclass(frozen=True)
class NoEscape:
    max_n: int
    word: str


def lift_dvr_point(point: DVRPoint, max_n: int = 64) -> Escaped | NoEscape:
    """Follow the unique lifts of the point through the blow-up tower.

    At level n the point escapes when its closed image differs from the
    center: a coordinate is a unit, the chart ratio is a unit, or the point
    enters a different chart than the center.  A point that factors through
    the origin lifts to the first exceptional curve instead.
    """
    a, b = point.a, point.b
    if a.is_zero() and b.is_zero():
        return Escaped(1, "factors-through-origin", "(0, 1)", "")
    tower = BlowupTower.initial()
    word = ""
    n = 0
    while True:
        pa, pb = a.t_order(), b.t_order()
        if pa == 0:
            return Escaped(n, "unit-coordinate", f"first coordinate {a}", word)
        if pb == 0:
            return Escaped(n, "unit-coordinate", f"second coordinate {b}", word)
        if n == max_n:
            return NoEscape(max_n, word)
        nxt = tower.advance()
        center_letter = nxt.word[-1]
        if pa == pb:
            return Escaped(n + 1, "unit-ratio", f"ratio ({b})/({a})", word)
        point_letter = "A" if pa < pb else "B"
        if point_letter != center_letter:
            return Escaped(
                n + 1,
                "chart-divergence",
                f"point enters chart {point_letter}, center sits in {center_letter}",
                word + point_letter,
            )
        if point_letter == "A":
            b = b / a
        else:
            a = a / b
        word += point_letter
        tower = nxt
        n += 1


def predicted_escape_step(p, q, max_n: int = 256) -> int | None:
    """Independent escape predictor for a monomial point ``(t^p, t^q)``.

    Runs the integer subtractive sequence of ``(p, q)`` next to the exact
    center sequence of ``(1, sqrt(2))``, comparing chart letters and
    watching for a zero difference.  Infinite orders stand for identically
    zero coordinates.
    """
    if p == math.inf and q == math.inf:
        return 1
    tower = BlowupTower.initial()
    n = 0
    while n <= max_n:
        if p == 0 or q == 0:
            return n
        nxt = tower.advance()
        center_letter = nxt.word[-1]
        if p == q:
            return n + 1
        point_letter = "A" if p < q else "B"
        if point_letter != center_letter:
            return n + 1
        if point_letter == "A":
            q = q - p
        else:
            p = p - q
        tower = nxt
        n += 1
    return None


@dataclass(frozen=True)
class RvTrace:
    steps: tuple[CenterStep, ...]
    chart_word: str
    all_positive: bool
    periodicity: tuple[int, int] | None

    @property
    def escaped(self) -> bool:
        return not self.all_positive


def canonical_rv_trace(n: int) -> RvTrace:
    """The canonical valuation-ring point followed through ``n`` blow-ups.

    Its chart word is the center's own chart word, and both coordinate
    values stay strictly positive, so the point never escapes the centers.
    """
    steps = center_sequence(n)
    word = "".join(s.letter for s in steps if s.letter is not None)
    positive = all(
        s.beta.is_positive() and s.gamma.is_positive() for s in steps
    )
    return RvTrace(tuple(steps), word, positive, minimal_periodicity(word))


# ---------------------------------------------------------------------------
# the multiplicative-or-zero lifting test and divisibility witnesses


@dataclass(frozen=True)
class GmLift:
    pass


@dataclass(frozen=True)
class ZeroLift:
    pass


@dataclass(frozen=True)
class LiftFail:
    witness: str


SUPPORTED_MODELS = ("rational-field", "rational-function-field", "dvr")


def unit_or_zero_lift(r, model: str) -> GmLift | ZeroLift | LiftFail:
    """Lift an element along units-or-zero; fields always succeed.

    In the local-ring model a nonzero non-unit (positive t-order) fails and
    is returned as the witness.
    """
    if model == "rational-field":
        r = Fraction(r)
        return ZeroLift() if r == 0 else GmLift()
    if model == "rational-function-field":
        if isinstance(r, str):
            r = parse_rational_fn(r)
        return ZeroLift() if r.is_zero() else GmLift()
    if model == "dvr":
        if isinstance(r, str):
            r = parse_rational_fn(r)
        if r.is_zero():
            return ZeroLift()
        order = r.t_order()
        if order < 0:
            raise ValuationError("element lies outside the local ring at t = 0")
        if order == 0:
            return GmLift()
        return LiftFail(str(r))
    raise ValuationError(f"unsupported ring model {model!r}; use one of {SUPPORTED_MODELS}")


@dataclass(frozen=True)
class Divisible:
    pass


@dataclass(frozen=True)
class DivisionWitness:
    element: GroupElement


def _is_prime(l: int) -> bool:
    if l < 2:
        return False
    d = 2
    while d * d <= l:
        if l % d == 0:
            return False
        d += 1
    return True


GROUP_NAMES = {
    "Z": "Z",
    "Z+sqrt2Z": "Z+sqrt2Z",
    "Z[sqrt2]": "Z+sqrt2Z",
    "Z+aZ": "Z+sqrt2Z",
    "Q": "Q",
}


def divisibility_witness(group: str, l: int) -> Divisible | DivisionWitness:
    """Find an element with no l-th division, or certify full divisibility.

    For Z and Z + Z*sqrt(2) the element 1 works: dividing it by a prime
    leaves the group because the coefficients of 1 and sqrt(2) are unique.
    """
    if not _is_prime(l):
        raise ValuationError(f"{l} is not prime")
    kind = GROUP_NAMES.get(group)
    if kind is None:
        raise ValuationError(f"unsupported group {group!r}")
    if kind == "Q":
        return Divisible()
    candidate = GROUP_ONE
    divided = has_division_by(candidate, l)
    if divided is None:
        return DivisionWitness(candidate)
    raise ValuationError("a prime unexpectedly divides 1 in a discrete group")
