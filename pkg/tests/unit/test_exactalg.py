"""
Unit tests for the exact arithmetic kernel.
"""
import random

import pytest
from fractions import Fraction

from app.config import get_settings
from app.core import exactalg
from app.core.exactalg import (
    IMAG_UNIT,
    INFINITY,
    SQRT2,
    GradedSeries,
    Scalar,
    polynomial_ring,
    rational_field,
    rational_residues,
    specialize,
    substitute,
    to_fraction,
    to_qq,
)
from app.core.exceptions import BranchError, ComputationError, PrecisionError


class TestScalar:
    """Tests for Q(i, sqrt 2) scalars."""

    def test_units_square(self):
        """Test i^2 = -1 and sqrt(2)^2 = 2."""
        assert IMAG_UNIT * IMAG_UNIT == -1
        assert SQRT2 * SQRT2 == 2
        assert (IMAG_UNIT * SQRT2) ** 2 == -2

    def test_inverse(self):
        """Test multiplicative inverse of a mixed element."""
        x = Scalar(1, Fraction(1, 2), 3, -1)
        assert x * x.inverse() == 1
        assert x / x == Scalar(1)

    def test_inverse_of_zero(self):
        """Test zero has no inverse."""
        with pytest.raises(ZeroDivisionError):
            Scalar().inverse()

    def test_str_and_parse(self):
        """Test the textual form reads back."""
        x = Scalar(Fraction(1, 2), -3, 0, Fraction(2, 5))
        assert str(x) == "1/2 - 3 i + 2/5 i r2"
        assert Scalar.parse(str(x)) == x
        assert Scalar.parse("0") == Scalar()

    def test_parse_rejects_garbage(self):
        """Test malformed scalar text."""
        with pytest.raises(ValueError, match="malformed"):
            Scalar.parse("1/2 + sqrt")


class TestArithmeticProperties:
    """Seeded random checks of the ring laws for scalars and polynomials."""

    @pytest.fixture
    def rng(self):
        return random.Random(get_settings().random_seed)

    @staticmethod
    def _fraction(rng):
        return Fraction(rng.randint(-9, 9), rng.randint(1, 6))

    def _scalar(self, rng):
        return Scalar(*(self._fraction(rng) for _ in range(4)))

    def _poly(self, ring, rng):
        poly = ring.zero
        for _ in range(rng.randint(1, 5)):
            monom = ring.one
            for gen in ring.gens:
                monom = monom * gen ** rng.randint(0, 3)
            poly += monom * to_qq(self._fraction(rng))
        return poly

    def test_scalar_ring_laws(self, rng):
        """Test associativity, distributivity and commutativity on random scalars."""
        for _ in range(40):
            a, b, c = (self._scalar(rng) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a

    def test_scalar_cancellation(self, rng):
        """Test x - x vanishes and x * x^-1 = 1 exactly."""
        for _ in range(40):
            a = self._scalar(rng)
            assert not (a - a)
            assert a + (-a) == Scalar()
            if a:
                assert a * a.inverse() == 1
                assert (a * a) / a == a

    def test_scalar_parts_are_canonical(self, rng):
        """Test products reduce to a unique representative over 1, i, sqrt 2, i sqrt 2."""
        for _ in range(20):
            a, b = self._scalar(rng), self._scalar(rng)
            product = a * b
            assert Scalar(*product.parts) == product
            assert hash(Scalar(*product.parts)) == hash(product)
        assert (SQRT2 * IMAG_UNIT) * (SQRT2 * IMAG_UNIT) == Scalar(-2)
        assert (SQRT2 * SQRT2).is_rational()

    def test_polynomial_ring_laws(self, rng):
        """Test the ring laws and exact division on random polynomials in QQ[x, y]."""
        ring = polynomial_ring(("x", "y"))
        for _ in range(20):
            p, q, r = (self._poly(ring, rng) for _ in range(3))
            assert (p * q) * r == p * (q * r)
            assert p * (q + r) == p * q + p * r
            assert not (p * q - q * p)
            if q:
                assert (p * q).exquo(q) == p

    def test_no_unused_series_helpers(self):
        """Test the kernel exposes series arithmetic only through GradedSeries."""
        for name in ("series_arith", "series_exp_log", "series_sqrt", "dehomogenize"):
            assert not hasattr(exactalg, name)


class TestGradedSeries:
    """Tests for truncated graded series."""

    def test_exp_log(self):
        """Test exp of t and log of the result."""
        s = GradedSeries("t", {1: Fraction(1)}, 5)
        e = s.exp()
        assert e.precision == 5
        assert e.coefficient(4) == Fraction(1, 24)
        assert e.log() == s

    def test_exp_needs_positive_valuation(self):
        """Test exp rejects a constant term."""
        with pytest.raises(PrecisionError):
            GradedSeries("t", {0: 1, 1: 1}, 3).exp()

    def test_inverse_geometric(self):
        """Test 1/(1 - t) = 1 + t + t^2 + t^3 + O(t^4)."""
        inv = GradedSeries("t", {0: 1, 1: -1}, 4).inverse()
        assert inv == GradedSeries("t", {0: 1, 1: 1, 2: 1, 3: 1}, 4)

    def test_sqrt(self):
        """Test sqrt((1 + t)^2) = 1 + t."""
        s = GradedSeries("t", {0: 1, 1: 2, 2: 1}, 5)
        assert s.sqrt() == GradedSeries("t", {0: 1, 1: 1}, 5)

    def test_sqrt_branch_errors(self):
        """Test leading coefficients without a rational root and odd valuations."""
        with pytest.raises(BranchError):
            GradedSeries("t", {0: 2, 1: 1}, 3).sqrt()
        with pytest.raises(BranchError):
            GradedSeries("t", {1: 1}, 3).sqrt()
        with pytest.raises(BranchError, match="does not square"):
            GradedSeries("t", {0: 4}, 3).sqrt(3)

    def test_coefficient_beyond_window(self):
        """Test reading past the truncation raises."""
        s = GradedSeries("t", {0: 1}, 2)
        assert s.coefficient(1) == 0
        with pytest.raises(PrecisionError):
            s.coefficient(2)

    def test_unit_mismatch(self):
        """Test series with different exponent steps do not mix."""
        half = GradedSeries("t", {1: 1}, unit=Fraction(1, 2))
        with pytest.raises(PrecisionError, match="unit mismatch"):
            half + GradedSeries("t", {1: 1})

    def test_product_precision(self):
        """Test the product keeps the smaller relative window."""
        s = GradedSeries("t", {1: 1}, 4)
        product = s * s
        assert product.precision == 5
        assert product.coefficient(2) == 1

    def test_log_derivative_and_residue(self):
        """Test t d/dt and the residue of a Laurent series."""
        s = GradedSeries("t", {-1: Fraction(3), 2: Fraction(1, 2)}, 4)
        assert s.residue() == 3
        assert s.log_derivative() == GradedSeries("t", {-1: Fraction(-3), 2: Fraction(1)}, 4)

    def test_nested_coefficients(self):
        """Test a series whose coefficients are series in another variable."""
        inner = GradedSeries("h", {0: 1, 1: 1}, 3)
        outer = GradedSeries("Lambda", {0: inner}, 2)
        squared = outer * outer
        assert squared.coefficient(0) == GradedSeries("h", {0: 1, 1: 2, 2: 1}, 3)


class TestRationalFunctions:
    """Tests for substitution and residues of rational functions."""

    def test_substitute_is_simultaneous(self):
        """Test x <-> y in one step."""
        fld = rational_field(("x", "y"))
        x, y = fld.gens
        assert substitute(x / (x + y * 2), {"x": y, "y": x}) == y / (y + x * 2)

    def test_substitute_rejects_vanishing_denominator(self):
        """Test a substitution that kills the denominator."""
        fld = rational_field(("x", "y"))
        x, y = fld.gens
        with pytest.raises(ComputationError, match="vanishes"):
            substitute(1 / (x - y), {"x": y})
        with pytest.raises(ComputationError, match="not a polynomial"):
            substitute(x, {"x": 1 / y})

    def test_specialize_to_constant(self):
        """Test specialize followed by to_fraction."""
        fld = rational_field(("x", "y"))
        x, y = fld.gens
        value = specialize(specialize((x + 1) / (y * 3), "x", fld(2)), "y", fld(5))
        assert to_fraction(value) == Fraction(1, 5)

    def test_residues_sum_to_zero(self):
        """Test residues of dx/(x(x-1)) at 0, 1 and infinity."""
        ring = polynomial_ring(("x",))
        x = ring.gens[0]
        result = rational_residues((ring.one, x * (x - 1)), "x", [0, 1])
        assert result[Fraction(0)] == -1
        assert result[Fraction(1)] == 1
        assert result[INFINITY] == 0

    def test_residue_at_infinity(self):
        """Test dx/x has residue -1 at infinity."""
        ring = polynomial_ring(("x",))
        x = ring.gens[0]
        result = rational_residues((ring.one, x), "x", [0])
        assert result[Fraction(0)] == 1
        assert result[INFINITY] == -1
