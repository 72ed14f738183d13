"""
Unit tests for the blow-up formula.
"""
import pytest
from fractions import Fraction
from unittest.mock import patch

from app.core import conventions
from app.core.conventions import LAMBDA
from app.core.exactalg import GradedSeries
from app.core.exceptions import ConventionError, InvalidInputError
from app.services.blowup_service import (
    BlowupService,
    difference_symbol,
    lattice_points,
    pert_symbol,
)
from app.services.prepotential_service import am_field


@pytest.fixture(scope="module")
def service():
    return BlowupService()


class TestSymbolCalculus:
    """Tests for the perturbative difference symbol."""

    def test_structure_sheaf_symbol_vanishes(self):
        """Test the two charts reproduce the plane for shift 0."""
        assert difference_symbol(0) == {}

    def test_shift_one_symbol(self):
        """Test shift 1 leaves the constant -1."""
        assert difference_symbol(1) == {(0, 0): -1}

    def test_lattice_points(self):
        """Test k1 runs over Z - k/2."""
        assert lattice_points(0, 1) == [Fraction(-1), Fraction(0), Fraction(1)]
        assert lattice_points(1, 1) == [Fraction(-1, 2), Fraction(1, 2)]

    def test_lattice_congruence(self):
        """Test k1 must satisfy k1 = -k/2 mod Z."""
        with pytest.raises(ConventionError):
            pert_symbol(Fraction(1, 3), 0)
        with pytest.raises(ConventionError):
            pert_symbol(Fraction(0), 1)

    def test_origin_carries_no_weight(self):
        """Test the k = 0 lattice vector has valuation zero."""
        assert pert_symbol(Fraction(0), 0).valuation == 0

    def test_symbol_checks(self, service):
        """Test the Todd identity and the hand-telescoped k = (1, -1) factor."""
        checks = service.symbol_checks(t_order=6)
        assert all(c.passed for c in checks), [c.description for c in checks if not c.passed]


class TestBlowupRatio:
    """Tests for the ratio of blown-up and plane partition functions."""

    def test_rejects_c1(self, service):
        """Test only c1 in {0, C} is accepted."""
        with pytest.raises(InvalidInputError):
            service.blowup_ratio(2, 3, 1)

    def test_rejects_large_orders(self, service):
        """Test orders beyond the configured bounds."""
        with pytest.raises(InvalidInputError, match="bounds"):
            service.blowup_ratio(1, 99, 1)

    def test_linear_term_cancels(self, service):
        """Test the t^1 coefficient of the c1 = 0 ratio vanishes at one instanton."""
        ratio = service.blowup_ratio(0, 1, 1)
        assert not ratio.series.coefficient(1)

    def test_mass_sign_drives_cancellation(self):
        """Test the opposite sign of the m-term leaves a t-linear remainder."""
        assert conventions.BLOWUP_MASS_SIGN == -1
        with patch.object(conventions, "BLOWUP_MASS_SIGN", 1):
            ratio = BlowupService().blowup_ratio(0, 1, 1)
        assert ratio.series.coefficient(1)

    @pytest.mark.slow
    def test_first_coefficient(self, service):
        """Test the t^1 coefficient of the c1 = C ratio is -Lambda."""
        ratio = service.blowup_ratio(1, 3, 2)
        expected = GradedSeries(LAMBDA, {1: -am_field().one})
        assert ratio.series.coefficient(1).first_difference(expected) is None
        assert not ratio.series.coefficient(0)

    @pytest.mark.slow
    def test_vanishing(self, service):
        """Test the c1 = 0 ratio is 1 + O(t^3)."""
        ratio = service.blowup_ratio(0, 2, 2)
        assert ratio.series.coefficient(0).first_difference(GradedSeries(LAMBDA, {0: am_field().one})) is None
        assert not ratio.series.coefficient(1)
        assert not ratio.series.coefficient(2)

    @pytest.mark.slow
    def test_checks_pass(self, service):
        """Test vanishing, coefficient and lattice checks at low order."""
        checks = service.checks(t_order=5, lambda_order=2)
        assert all(c.passed for c in checks), [c.description for c in checks if not c.passed]
