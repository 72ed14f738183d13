"""
Unit tests for the residue calculus, Witten's formula and superconformal simple type.
"""
import pytest
from fractions import Fraction
from unittest.mock import patch

from app.core.exactalg import INFINITY, to_qq
from app.core.exceptions import ParityViolation
from app.core.phiforms import alpha_ring, parity_defects, rationalize, v_ring
from app.models.surface_models import load_surface
from app.services.mochizuki_service import (
    MochizukiService,
    build_differential,
    sw_series,
    symmetrize,
    witten_series,
)


@pytest.fixture(scope="module")
def service():
    return MochizukiService()


def _failed(checks):
    return [f"{c.tag}: {c.description} {c.details}" for c in checks if not c.passed]


class TestWittenSeries:
    """Tests for the closed-form side of Witten's formula."""

    def test_k3(self):
        """Test K3 gives exp(A2/2)."""
        k3 = load_surface("k3")
        ring = alpha_ring(tuple(k3.basis))
        a2 = ring.gens[0]
        expected = 1 + a2 * to_qq(Fraction(1, 2)) + a2 ** 2 * to_qq(Fraction(1, 8))
        assert witten_series(k3, [0, 0], 4) == expected

    def test_quintic_xi_zero(self):
        """Test the quintic with xi = 0 gives 8 sinh((K, alpha)) exp(A2/2)."""
        quintic = load_surface("quintic")
        ring = alpha_ring(("H",))
        a2, b = ring.gens
        expected = 8 * b + 4 * a2 * b + b ** 3 * to_qq(Fraction(4, 3))
        assert witten_series(quintic, [0], 3) == expected

    def test_quintic_xi_h(self):
        """Test the quintic with xi = H gives -8 cosh((K, alpha)) exp(A2/2)."""
        quintic = load_surface("quintic")
        ring = alpha_ring(("H",))
        a2, b = ring.gens
        expected = -8 - 4 * a2 - 4 * b ** 2
        assert witten_series(quintic, [1], 2) == expected


class TestDifferential:
    """Tests for the differential before symmetrization."""

    def test_branch_signs(self):
        """Test (s1, s2) -> (-s1, -s2) fixes the parity projection."""
        quintic = load_surface("quintic")
        p = quintic.dimension_mod4([0])
        single = build_differential(quintic, [1], [0], 5).project(p)
        assert single.numer == single.flip(s1=True, s2=True).numer

    def test_tower_denominator(self):
        """Test K^2 < chi_h leaves (1 - 3v) in the denominator."""
        k3 = load_surface("k3")
        assert build_differential(k3, [0, 0], [0, 0], 2).at_third == 2
        assert build_differential(load_surface("quintic"), [1], [0], 2).at_third == 0


class TestResidues:
    """Tests for residues at v = 0, 1, 1/3 and infinity."""

    def test_k3_residue_checks(self, service):
        """Test parity, residue theorem, infinity and v = 1 for K3."""
        k3 = load_surface("k3")
        assert not _failed(service.residue_checks(k3, "0", 4))

    def test_residue_theorem(self, service):
        """Test the four residues of the quintic sum to zero."""
        quintic = load_surface("quintic")
        table = service.residue_table(quintic, "0", 5)
        for entry in table.values():
            assert set(entry.residues) == {Fraction(0), Fraction(1), Fraction(1, 3), INFINITY}
            total = sum(entry.residues.values(), entry.form.numer.ring.zero)
            assert not total

    @pytest.mark.slow
    def test_quintic_report(self, service):
        """Test the full residue report for the quintic."""
        report = service.residues_report("quintic", 6)
        assert not _failed(report.checks)
        assert set(report.results) == {"0", "H"}


class TestWitten:
    """Tests for Witten's formula from the residue at phi^4 = 1."""

    def test_k3(self, service):
        """Test K3 through alpha-degree 4."""
        report = service.witten_report("k3", 6)
        assert not _failed(report.checks)

    @pytest.mark.slow
    def test_quintic(self, service):
        """Test the quintic for both xi."""
        report = service.witten_report("quintic", 7)
        assert not _failed(report.checks)
        assert set(report.results) == {"0", "H"}


class TestSuperconformal:
    """Tests for the superconformal simple type conditions."""

    def test_elliptic_vanishing_order(self, service):
        """Test SW(alpha) of E(5) vanishes to order 3 and the moments vanish."""
        verdict = service.scst_check(load_surface("elliptic3"), 6)
        assert verdict.vanishing_order == 3
        assert verdict.superconformal
        assert not verdict.vacuous
        assert not _failed(verdict.checks)

    def test_vacuous_for_general_type(self, service):
        """Test K^2 >= chi_h - 3 makes the condition vacuous."""
        verdict = service.scst_check(load_surface("quintic"), 4)
        assert verdict.vacuous
        assert verdict.superconformal

    def test_artificial_data_fails(self, service):
        """Test the zeroth moment of the artificial data does not vanish."""
        verdict = service.scst_check(load_surface("artificial"), 4)
        assert not verdict.superconformal
        assert verdict.moments[0] == "1"

    def test_blowup_relation(self, service):
        """Test SW of the blown-up quintic is -2 SW(quintic) sinh((E, alpha))."""
        verdict = service.scst_check(load_surface("quintic_blowup"), 5)
        assert not _failed(verdict.checks)
        assert any(c.tag == "eq:blowup-sw" for c in verdict.checks)

    def test_sw_series_parity(self):
        """Test SW(-alpha) = (-1)^(chi_h - K^2) SW(alpha) for E(5)."""
        surface = load_surface("elliptic3")
        series = sw_series(surface, 5)
        flipped = series.ring.from_dict({m: c * (-1) ** sum(m[1:]) for m, c in series.terms()})
        assert flipped == series * (-1) ** (surface.chi_h - surface.ksq)

    @pytest.mark.slow
    def test_artificial_keeps_residue_at_one_third(self, service):
        """Test the scst report flags the artificial data and its residue at 1/3."""
        report = service.scst_report("artificial", 8)
        assert report.results["superconformal"] is False
        assert not _failed(report.checks[1:])

    @pytest.mark.parametrize("name,order", [("elliptic2", 2), ("elliptic4", 4)])
    def test_elliptic_with_zero_class(self, service, name, order):
        """Test surfaces with the basic class c = 0 give vanishing moments."""
        verdict = service.scst_check(load_surface(name), 4)
        assert verdict.superconformal
        assert not verdict.vacuous
        assert verdict.vanishing_order == order
        assert all(moment == "0" for moment in verdict.moments.values())
        assert not _failed(verdict.checks)

    def test_artificial_moments_recorded(self, service):
        """Test every moment of the artificial data is computed despite c = 0."""
        surface = load_surface("artificial")
        verdict = service.scst_check(surface, 4)
        assert set(verdict.moments) == set(range(surface.chi_h - surface.ksq - 3))


class TestParityDefects:
    """Tests for the parity verdict on symmetrized differentials."""

    def test_symmetrized_has_no_defects(self):
        """Test the symmetrized quintic differential is clean."""
        quintic = load_surface("quintic")
        assert parity_defects(symmetrize(quintic, [1], [0], 5)) == []

    def test_single_class_has_defects(self):
        """Test one class before symmetrization keeps odd root components."""
        quintic = load_surface("quintic")
        defects = parity_defects(build_differential(quintic, [1], [0], 5))
        assert defects
        assert any("survived symmetrization" in d for d in defects)

    def test_rationalize_reports_first_defect(self):
        """Test rationalize raises ParityViolation with the first defect."""
        quintic = load_surface("quintic")
        element = build_differential(quintic, [1], [0], 5)
        with pytest.raises(ParityViolation) as e:
            rationalize(element, v_ring(("H",)))
        assert str(e.value) == parity_defects(element)[0]

    def test_residue_checks_record_defects(self, service):
        """Test the parity entry carries the computed defect list."""
        k3 = load_surface("k3")
        checks = [c for c in service.residue_checks(k3, "0", 4)
                  if c.description.startswith("root components vanish")]
        assert checks
        assert all(c.passed and c.details["defects"] == [] for c in checks)

    def test_residue_checks_fail_on_defects(self, service):
        """Test a defect turns the parity entry into a failure."""
        k3 = load_surface("k3")
        with patch("app.services.mochizuki_service.parity_defects", return_value=["phi-exponent 2 is not a multiple of 4"]):
            checks = [c for c in service.residue_checks(k3, "0", 4)
                      if c.description.startswith("root components vanish")]
        assert checks
        assert not any(c.passed for c in checks)
        assert checks[0].details["defects"] == ["phi-exponent 2 is not a multiple of 4"]
