"""
Exact arithmetic kernel.

Scalars live in Q(i, sqrt 2). Multivariate polynomials and rational functions
are sympy ring and field elements over QQ. A GradedSeries is a truncated
Laurent series in one grading variable; its coefficients may be any exact ring
element, including another GradedSeries in a different variable.
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Tuple, Union

from sympy import QQ
from sympy.polys.fields import FracElement, xfield
from sympy.polys.rings import PolyElement, xring

from app.core.exceptions import BranchError, ComputationError, PrecisionError

logger = logging.getLogger(__name__)

MultiPoly = PolyElement
RationalFn = FracElement

INFINITY = "inf"


def _frac(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot coerce {value!r} to an exact rational")


def to_qq(value: Any):
    """Convert an int, Fraction or QQ element into a sympy QQ element."""
    q = _frac(value)
    return QQ(q.numerator, q.denominator)


def to_fraction(value: Any) -> Fraction:
    """Convert a QQ element, ground polynomial or int into a Fraction."""
    if isinstance(value, PolyElement):
        if not value.is_ground:
            raise ComputationError(f"{value} is not a constant")
        return _frac(value.LC) if value else Fraction(0)
    if isinstance(value, FracElement):
        return to_fraction(value.numer) / to_fraction(value.denom)
    return _frac(value)


# ---------------------------------------------------------------------------
# Scalars in Q(i, sqrt 2)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _scalar_ring():
    """QQ[i, r2] and the relations i^2 + 1, r2^2 - 2; remainders are canonical."""
    ring, (i, r2) = xring("i,r2", QQ)
    return ring, [i ** 2 + 1, r2 ** 2 - 2]


# monomials of 1, i, sqrt 2, i sqrt 2 in QQ[i, r2]
_SCALAR_BASIS = ((0, 0), (1, 0), (0, 1), (1, 1))


class Scalar:
    """
    r0 + r1*i + r2*sqrt(2) + r3*i*sqrt(2), held as a reduced element of
    QQ[i, r2] / (i^2 + 1, r2^2 - 2).
    """

    __slots__ = ("value",)

    def __init__(self, r0: Any = 0, r1: Any = 0, r2: Any = 0, r3: Any = 0):
        ring, _ = _scalar_ring()
        i, s = ring.gens
        self.value = ring(to_qq(r0)) + i * to_qq(r1) + s * to_qq(r2) + i * s * to_qq(r3)

    @classmethod
    def _reduced(cls, poly: PolyElement) -> "Scalar":
        _, relations = _scalar_ring()
        scalar = cls.__new__(cls)
        scalar.value = poly.rem(relations)
        return scalar

    @classmethod
    def coerce(cls, value: Any) -> "Scalar":
        if isinstance(value, Scalar):
            return value
        return cls(_frac(value))

    @property
    def parts(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        terms = dict(self.value.terms())
        return tuple(_frac(terms[m]) if m in terms else Fraction(0) for m in _SCALAR_BASIS)

    @property
    def r0(self) -> Fraction:
        return self.parts[0]

    @property
    def r1(self) -> Fraction:
        return self.parts[1]

    @property
    def r2(self) -> Fraction:
        return self.parts[2]

    @property
    def r3(self) -> Fraction:
        return self.parts[3]

    def is_rational(self) -> bool:
        return self.value.is_ground

    def __bool__(self) -> bool:
        return bool(self.value)

    def __eq__(self, other: Any) -> bool:
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(self.parts)

    def __add__(self, other: Any) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar._reduced(self.value + o.value)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._reduced(-self.value)

    def __sub__(self, other: Any) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar._reduced(self.value - o.value)

    def __rsub__(self, other: Any) -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other: Any) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar._reduced(self.value * o.value)

    __rmul__ = __mul__

    def conjugate_sqrt2(self) -> "Scalar":
        """Image under sqrt(2) -> -sqrt(2)."""
        ring, _ = _scalar_ring()
        s = ring.gens[1]
        return Scalar._reduced(self.value.compose(s, -s))

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("inverse of zero scalar")
        # x * conj(x) lies in Q(i) and is nonzero because sqrt(2) is not in Q(i)
        norm = self * self.conjugate_sqrt2()
        n0, n1 = norm.r0, norm.r1
        d = n0 * n0 + n1 * n1
        return self.conjugate_sqrt2() * Scalar(n0 / d, -n1 / d)

    def __truediv__(self, other: Any) -> "Scalar":
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Any) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "Scalar":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = Scalar(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __str__(self) -> str:
        pieces = []
        for value, suffix in zip(self.parts, ("", " i", " r2", " i r2")):
            if not value:
                continue
            text = f"{abs(value)}{suffix}"
            if not pieces:
                pieces.append(f"-{text}" if value < 0 else text)
            else:
                pieces.append(f"{'-' if value < 0 else '+'} {text}")
        return " ".join(pieces) if pieces else "0"

    def __repr__(self) -> str:
        return f"Scalar({self})"

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """Inverse of str(): "p/q [+ p/q i] [+ p/q r2] [+ p/q i r2]"."""
        body = text.strip()
        if body == "0":
            return cls()
        parts = {"": Fraction(0), "i": Fraction(0), "r2": Fraction(0), "i r2": Fraction(0)}
        position = 0
        for match in _SCALAR_TERM.finditer(body):
            if match.start() != position:
                raise ValueError(f"malformed scalar {text!r}")
            sign, value, unit = match.group(1), match.group(2), match.group(3) or ""
            amount = Fraction(value)
            parts[unit] += -amount if sign == "-" else amount
            position = match.end()
        if position != len(body):
            raise ValueError(f"malformed scalar {text!r}")
        return cls(parts[""], parts["i"], parts["r2"], parts["i r2"])


_SCALAR_TERM = re.compile(r"\s*([+-]?)\s*(\d+(?:/\d+)?)(?:\s+(i r2|r2|i))?\s*")

IMAG_UNIT = Scalar(0, 1)
SQRT2 = Scalar(0, 0, 1)


# ---------------------------------------------------------------------------
# Polynomial rings and rational function fields
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def polynomial_ring(names: Tuple[str, ...]):
    """QQ[names] as a sympy PolyRing."""
    ring, _ = xring(",".join(names), QQ)
    return ring


@lru_cache(maxsize=None)
def rational_field(names: Tuple[str, ...]):
    """QQ(names) as a sympy FracField."""
    fld, _ = xfield(",".join(names), QQ)
    return fld


def generator(domain, name: str):
    """Generator of a sympy ring or field by symbol name."""
    names = [str(s) for s in domain.symbols]
    try:
        return domain.gens[names.index(name)]
    except ValueError:
        raise ComputationError(f"{name} is not a generator of {domain}") from None


def split_by(poly: PolyElement, name: str) -> Dict[int, PolyElement]:
    """Coefficients of poly as a polynomial in one generator."""
    ring = poly.ring
    idx = [str(s) for s in ring.symbols].index(name)
    buckets: Dict[int, Dict[tuple, Any]] = {}
    for monom, coeff in poly.terms():
        rest = monom[:idx] + (0,) + monom[idx + 1:]
        buckets.setdefault(monom[idx], {})[rest] = coeff
    return {e: ring.from_dict(d) for e, d in buckets.items()}


def _reverse(poly: PolyElement, idx: int, degree: int) -> PolyElement:
    terms = {}
    for monom, coeff in poly.terms():
        terms[monom[:idx] + (degree - monom[idx],) + monom[idx + 1:]] = coeff
    return poly.ring.from_dict(terms)


def homogenize(poly: PolyElement, target_field, degree: int, weight: str) -> FracElement:
    """
    Lift a polynomial computed at weight = 1 to the homogeneous rational
    function of the given total degree in target_field.
    """
    fring = target_field.ring
    w = generator(fring, weight)
    if not poly:
        return target_field.zero
    names = [str(s) for s in poly.ring.symbols]
    gens = [generator(fring, n) for n in names]
    shift = max(0, max(sum(m) - degree for m in poly.monoms()))
    numer = fring.zero
    for monom, coeff in poly.terms():
        term = fring.ground_new(coeff) * w ** (degree - sum(monom) + shift)
        for g, e in zip(gens, monom):
            if e:
                term *= g ** e
        numer += term
    return target_field(numer) / target_field(w ** shift)


def specialize(value: FracElement, name: str, replacement) -> FracElement:
    """Substitute a generator by a field element; the denominator must survive."""
    fld = value.field
    x = generator(fld.ring, name)
    rep = fld(replacement)
    if rep.denom != fld.ring.one:
        numer = _compose_frac(value.numer, x, rep)
        denom = _compose_frac(value.denom, x, rep)
    else:
        numer = fld(value.numer.compose(x, rep.numer))
        denom = fld(value.denom.compose(x, rep.numer))
    if not denom:
        raise ComputationError(f"denominator of {value} vanishes under {name} -> {replacement}")
    return numer / denom


def substitute(value: FracElement, replacements: Mapping[str, Any]) -> FracElement:
    """
    Simultaneous substitution of generators by polynomials of the same field.

    Raises:
        ComputationError: a replacement is not polynomial or the denominator vanishes
    """
    fld = value.field
    pairs = []
    for name, replacement in replacements.items():
        rep = fld(replacement)
        if rep.denom != fld.ring.one:
            raise ComputationError(f"replacement {replacement} for {name} is not a polynomial")
        pairs.append((generator(fld.ring, name), rep.numer))
    numer = value.numer.compose(pairs)
    denom = value.denom.compose(pairs)
    if not denom:
        raise ComputationError(f"denominator of {value} vanishes under {dict(replacements)}")
    return fld(numer) / fld(denom)


def _compose_frac(poly: PolyElement, x, rep: FracElement) -> FracElement:
    fld = rep.field
    result = fld.zero
    for e, coeff in split_by(poly, str(x)).items():
        result += fld(coeff) * rep ** e
    return result


# ---------------------------------------------------------------------------
# Generic coefficient helpers
# ---------------------------------------------------------------------------

def _is_zero(c: Any) -> bool:
    return not c


def _is_one(c: Any) -> bool:
    if isinstance(c, GradedSeries):
        return list(c.terms) == [0] and _is_one(c.terms[0])
    return c == 1


def _div(c: Any, n: int) -> Any:
    if isinstance(c, int):
        return Fraction(c, n) if c else 0
    return c / n


def _times_rational(c: Any, q: Fraction) -> Any:
    if q.denominator == 1:
        return c * int(q)
    return _div(c * q.numerator, q.denominator)


def _reciprocal(c: Any) -> Any:
    if isinstance(c, GradedSeries):
        return c.inverse()
    if isinstance(c, PolyElement):
        if not c or not c.is_ground:
            raise PrecisionError(f"leading coefficient {c} is not an invertible constant")
        return c.ring.ground_new(1 / c.LC)
    if isinstance(c, int):
        if c == 0:
            raise PrecisionError("leading coefficient is zero")
        return Fraction(1, c)
    if not c:
        raise PrecisionError("leading coefficient is zero")
    return 1 / c


def _default_root(c: Any) -> Any:
    if _is_one(c):
        return 1
    try:
        q = to_fraction(c.r0 if isinstance(c, Scalar) and c.is_rational() else c)
    except (TypeError, ComputationError):
        raise BranchError(f"no root hint for leading coefficient {c}") from None
    if q >= 0:
        rn, rd = isqrt(q.numerator), isqrt(q.denominator)
        if rn * rn == q.numerator and rd * rd == q.denominator:
            return Fraction(rn, rd)
    raise BranchError(f"leading coefficient {c} needs an explicit root hint")


def _min_precision(*values: Optional[int]) -> Optional[int]:
    known = [v for v in values if v is not None]
    return min(known) if known else None


# ---------------------------------------------------------------------------
# Truncated graded series
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GradedSeries:
    """
    Truncated Laurent series sum_k c_k * variable^(k * unit).

    Keys of ``terms`` are integer multiples of ``unit``. ``precision`` is the
    exclusive upper bound on known indices; None means the series is exact.
    Operands in another variable are treated as coefficients.
    """

    variable: str
    terms: Mapping[int, Any] = field(default_factory=dict)
    precision: Optional[int] = None
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        unit = _frac(self.unit)
        if unit <= 0:
            raise PrecisionError("exponent unit must be positive")
        cleaned = {}
        for k, c in self.terms.items():
            k = int(k)
            if self.precision is not None and k >= self.precision:
                continue
            if _is_zero(c):
                continue
            cleaned[k] = c
        object.__setattr__(self, "terms", dict(sorted(cleaned.items())))
        object.__setattr__(self, "unit", unit)

    # construction -----------------------------------------------------------

    @classmethod
    def constant(cls, variable: str, value: Any, precision: Optional[int] = None, unit=1) -> "GradedSeries":
        return cls(variable, {0: value}, precision, unit)

    @classmethod
    def monomial(cls, variable: str, index: int, value: Any = 1,
                 precision: Optional[int] = None, unit=1) -> "GradedSeries":
        return cls(variable, {index: value}, precision, unit)

    # inspection -------------------------------------------------------------

    @property
    def valuation(self) -> Optional[int]:
        return next(iter(self.terms)) if self.terms else None

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, index: int) -> Any:
        if self.precision is not None and index >= self.precision:
            raise PrecisionError(
                f"coefficient {index} of {self.variable} lies beyond truncation {self.precision}"
            )
        return self.terms.get(index, 0)

    __getitem__ = coefficient

    def coefficient_at(self, grade: Any) -> Any:
        """Coefficient of variable^grade with grade an absolute exponent."""
        index = _frac(grade) / self.unit
        if index.denominator != 1:
            return 0
        return self.coefficient(int(index))

    def grade(self, index: int) -> Fraction:
        return index * self.unit

    def first_difference(self, other: "GradedSeries") -> Optional[int]:
        """First index inside the common window where two series differ."""
        bound = _min_precision(self.precision, other.precision)
        for k in sorted(set(self.terms) | set(other.terms)):
            if bound is not None and k >= bound:
                break
            if not _is_zero(self.terms.get(k, 0) - other.terms.get(k, 0)):
                return k
        return None

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return (
            self.variable == other.variable
            and self.unit == other.unit
            and self.precision == other.precision
            and self.first_difference(other) is None
        )

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*{self.variable}^{self.grade(k)}" for k, c in self.terms.items())
        tail = f" + O({self.variable}^{self.grade(self.precision)})" if self.precision is not None else ""
        return f"GradedSeries({body or '0'}{tail})"

    # arithmetic -------------------------------------------------------------

    def _same_grading(self, other: Any) -> bool:
        if isinstance(other, GradedSeries) and other.variable == self.variable:
            if other.unit != self.unit:
                raise PrecisionError(
                    f"exponent unit mismatch in {self.variable}: {self.unit} vs {other.unit}"
                )
            return True
        return False

    def _with(self, terms: Mapping[int, Any], precision: Optional[int]) -> "GradedSeries":
        return GradedSeries(self.variable, terms, precision, self.unit)

    def __add__(self, other: Any) -> "GradedSeries":
        if not self._same_grading(other):
            other = self._with({0: other}, None)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return self._with(terms, _min_precision(self.precision, other.precision))

    __radd__ = __add__

    def __neg__(self) -> "GradedSeries":
        return self._with({k: -c for k, c in self.terms.items()}, self.precision)

    def __sub__(self, other: Any) -> "GradedSeries":
        return self + (-other)

    def __rsub__(self, other: Any) -> "GradedSeries":
        return (-self) + other

    def _scale(self, factor: Any, left: bool) -> "GradedSeries":
        if left:
            return self._with({k: factor * c for k, c in self.terms.items()}, self.precision)
        return self._with({k: c * factor for k, c in self.terms.items()}, self.precision)

    def _product_precision(self, other: "GradedSeries") -> Optional[int]:
        bounds = []
        for first, second in ((self, other), (other, self)):
            if first.precision is None:
                continue
            v = second.valuation if second.terms else second.precision
            if v is not None:
                bounds.append(first.precision + v)
        return min(bounds) if bounds else None

    def __mul__(self, other: Any) -> "GradedSeries":
        if not self._same_grading(other):
            return self._scale(other, left=False)
        precision = self._product_precision(other)
        terms: Dict[int, Any] = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                k = i + j
                if precision is not None and k >= precision:
                    break
                p = a * b
                terms[k] = terms[k] + p if k in terms else p
        return self._with(terms, precision)

    def __rmul__(self, other: Any) -> "GradedSeries":
        return self._scale(other, left=True)

    def __truediv__(self, other: Any) -> "GradedSeries":
        if self._same_grading(other):
            return self * other.inverse()
        if isinstance(other, int):
            return self._with({k: _div(c, other) for k, c in self.terms.items()}, self.precision)
        return self * _reciprocal(other)

    def __rtruediv__(self, other: Any) -> "GradedSeries":
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "GradedSeries":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result: Any = self._with({0: 1}, None)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def inverse(self, precision: Optional[int] = None) -> "GradedSeries":
        """Multiplicative inverse; the leading coefficient must be invertible."""
        if not self.terms:
            raise PrecisionError(f"series in {self.variable} has no known leading term to invert")
        v = self.valuation
        lead_inv = _reciprocal(self.terms[v])
        relative = None if self.precision is None else self.precision - v
        if precision is not None:
            relative = _min_precision(relative, precision + v)
        if relative is None:
            if len(self.terms) == 1:
                return self._with({-v: lead_inv}, None)
            raise PrecisionError("exact inverse of a non-monomial series needs a target precision")
        if relative <= 0:
            raise PrecisionError(f"requested precision leaves no coefficients of 1/{self.variable}-series")
        coeffs = [lead_inv]
        for n in range(1, relative):
            acc: Any = 0
            for j in range(1, n + 1):
                c = self.terms.get(v + j)
                if c is not None:
                    acc = acc + c * coeffs[n - j]
            coeffs.append(-(lead_inv * acc) if not (isinstance(acc, int) and acc == 0) else 0)
        return self._with({n - v: c for n, c in enumerate(coeffs)}, relative - v)

    def _bound(self, precision: Optional[int]) -> Optional[int]:
        return _min_precision(self.precision, precision)

    def exp(self, precision: Optional[int] = None) -> "GradedSeries":
        if self.terms and self.valuation <= 0:
            raise PrecisionError(f"exp needs a series in {self.variable} with positive valuation")
        bound = self._bound(precision)
        if bound is None:
            if not self.terms:
                return self._with({0: 1}, None)
            raise PrecisionError("exp of an exact series needs a target precision")
        values: Dict[int, Any] = {0: 1}
        for n in range(1, bound):
            acc: Any = 0
            for k, f in self.terms.items():
                if k > n:
                    break
                prev = values.get(n - k)
                if prev is not None:
                    acc = acc + (f * prev) * k
            if not (isinstance(acc, int) and acc == 0):
                values[n] = _div(acc, n)
        return self._with(values, bound)

    def log(self, precision: Optional[int] = None) -> "GradedSeries":
        if self.valuation != 0 or not _is_one(self.terms[0]):
            raise PrecisionError(f"log needs a series in {self.variable} with constant term 1")
        if any(k < 0 for k in self.terms):
            raise PrecisionError("log of a series with a polar part")
        bound = self._bound(precision)
        if bound is None:
            if len(self.terms) == 1:
                return self._with({}, None)
            raise PrecisionError("log of an exact series needs a target precision")
        values: Dict[int, Any] = {}
        for n in range(1, bound):
            acc: Any = 0
            for k, lk in values.items():
                f = self.terms.get(n - k)
                if f is not None:
                    acc = acc + (lk * f) * k
            fn = self.terms.get(n)
            if isinstance(acc, int) and acc == 0:
                value = fn
            else:
                correction = _div(acc, n)
                value = -correction if fn is None else fn - correction
            if value is not None and not _is_zero(value):
                values[n] = value
        return self._with(values, bound)

    def sqrt(self, root: Any = None, precision: Optional[int] = None) -> "GradedSeries":
        """Square root whose leading coefficient equals ``root``."""
        if not self.terms:
            raise BranchError(f"square root of a series in {self.variable} without leading term")
        v = self.valuation
        if v % 2:
            raise BranchError(f"odd valuation {v} in {self.variable}")
        lead = self.terms[v]
        if root is None:
            root = _default_root(lead)
        if not _is_zero(root * root - lead):
            raise BranchError(f"root hint {root} does not square to {lead}")
        bound = self._bound(precision)
        if bound is None:
            if len(self.terms) == 1:
                return self._with({v // 2: root}, None)
            raise PrecisionError("square root of an exact series needs a target precision")
        relative = bound - v
        inv = _reciprocal(root * 2)
        values = [root]
        for n in range(1, relative):
            acc: Any = self.terms.get(v + n, 0)
            for k in range(1, n):
                acc = acc - values[k] * values[n - k]
            values.append(acc * inv if not (isinstance(acc, int) and acc == 0) else 0)
        return self._with({v // 2 + n: c for n, c in enumerate(values)}, v // 2 + relative)

    # calculus ---------------------------------------------------------------

    def log_derivative(self) -> "GradedSeries":
        """variable * d/d(variable): multiplies each coefficient by its grade."""
        return self._with(
            {k: _times_rational(c, k * self.unit) for k, c in self.terms.items()}, self.precision
        )

    def derivative(self) -> "GradedSeries":
        if self.unit != 1:
            raise PrecisionError("derivative is defined for unit exponent steps only")
        return self._with(
            {k - 1: c * k for k, c in self.terms.items() if k},
            None if self.precision is None else self.precision - 1,
        )

    def residue(self) -> Any:
        index = Fraction(-1) / self.unit
        if index.denominator != 1:
            return 0
        if self.precision is not None and index >= self.precision:
            raise PrecisionError(f"truncation window of {self.variable} excludes degree -1")
        return self.terms.get(int(index), 0)

    # structure --------------------------------------------------------------

    def truncate(self, precision: int) -> "GradedSeries":
        return self._with(self.terms, _min_precision(self.precision, precision))

    def shift(self, index: int) -> "GradedSeries":
        """Multiply by variable^(index * unit)."""
        return self._with(
            {k + index: c for k, c in self.terms.items()},
            None if self.precision is None else self.precision + index,
        )

    def map_coefficients(self, fn: Callable[[Any], Any]) -> "GradedSeries":
        return self._with({k: fn(c) for k, c in self.terms.items()}, self.precision)

    def to_json(self) -> Dict[str, Any]:
        return series_to_json(self)


def laurent_at(numer: PolyElement, denom: PolyElement, variable: str, point: Any,
               precision: int, local: str = "w") -> GradedSeries:
    """
    Local expansion of the 1-form (numer/denom) d(variable) at a point.

    Finite points use the parameter variable - point. At INFINITY the parameter
    is 1/variable and the expansion includes the d(1/w) = -dw/w^2 factor, so
    the residue of the result is the residue of the form.
    """
    if not numer:
        return GradedSeries(local, {}, precision)
    ring = numer.ring
    idx = [str(s) for s in ring.symbols].index(variable)
    x = ring.gens[idx]
    if point == INFINITY:
        dn, dd = numer.degree(x), denom.degree(x)
        n_local = _reverse(numer, idx, dn)
        d_local = _reverse(denom, idx, dd)
        shift, sign = dd - dn - 2, -1
    else:
        p = to_qq(point)
        n_local = numer.compose(x, x + p)
        d_local = denom.compose(x, x + p)
        shift, sign = 0, 1
    n_series = GradedSeries(local, split_by(n_local, variable))
    d_series = GradedSeries(local, split_by(d_local, variable))
    lead = d_series.terms[d_series.valuation]
    if not lead.is_ground:
        raise ComputationError(f"denominator of the form does not factor at {variable} = {point}")
    needed = precision - n_series.valuation - shift
    if needed + d_series.valuation <= 0:
        # numerator vanishes beyond the window: nothing below precision
        return GradedSeries(local, {}, precision)
    d_inv = d_series.inverse(precision=needed)
    result = (n_series * d_inv).shift(shift).truncate(precision)
    return -result if sign < 0 else result


def rational_residues(f: Union[FracElement, Tuple[PolyElement, PolyElement]], variable: str,
                      points: Iterable[Any]) -> Dict[Any, PolyElement]:
    """Residues of f d(variable) at the listed finite points and at infinity."""
    if isinstance(f, FracElement):
        numer, denom = f.numer, f.denom
    else:
        numer, denom = f
    result: Dict[Any, PolyElement] = {}
    for point in list(points) + [INFINITY]:
        key = point if point == INFINITY else _frac(point)
        local = laurent_at(numer, denom, variable, key, precision=0)
        value = local.residue()
        result[key] = numer.ring(value) if not isinstance(value, PolyElement) else value
    return result


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def format_coefficient(c: Any) -> Any:
    if isinstance(c, GradedSeries):
        return series_to_json(c)
    if isinstance(c, FracElement):
        return {"num": str(c.numer), "den": str(c.denom)}
    if isinstance(c, Scalar):
        return {"num": str(c), "den": "1"}
    if isinstance(c, PolyElement):
        return {"num": str(c), "den": "1"}
    q = _frac(c)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def series_to_json(s: GradedSeries) -> Dict[str, Any]:
    return {
        "variable": s.variable,
        "unit": str(s.unit),
        "precision": None if s.precision is None else str(s.grade(s.precision)),
        "terms": [
            {"exponent": str(s.grade(k)), "coefficient": format_coefficient(c)}
            for k, c in s.terms.items()
        ],
    }
