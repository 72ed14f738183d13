"""
Unit tests for the Z^inst report and the verification suite.
"""
import pytest

from app.core.exactalg import generator
from app.core.nekrasov import generic_field
from app.services.verification_service import VerificationService, _total_degrees


@pytest.fixture(scope="module")
def service():
    return VerificationService()


def _failed(report):
    return [f"{c.tag}: {c.description}" for c in report.checks if not c.passed]


class TestTotalDegrees:
    """Tests for the homogeneity bookkeeping."""

    def test_homogeneous(self):
        """Test numerator minus denominator degree."""
        fld = generic_field()
        e1, e2, a = (generator(fld, name) for name in ("e1", "e2", "a"))
        assert _total_degrees(1 / (e1 * e2)) == -2
        assert _total_degrees((a + e1) / (e1 * e2 * a ** 2)) == -3

    def test_inhomogeneous(self):
        """Test mixed degrees give None."""
        fld = generic_field()
        e1, e2 = generator(fld, "e1"), generator(fld, "e2")
        assert _total_degrees((e1 + 1) / e2) is None


class TestExpandZ:
    """Tests for the Z^inst report."""

    def test_one_flavour(self, service):
        """Test the N_f = 1 report through n = 2."""
        report = service.expand_z_report(2, 1, seed=7)
        assert not _failed(report)
        assert report.command == "expand-z"
        assert report.results["gamma"] == 3
        assert report.parameters == {"lambda_order": 2, "flavours": 1, "seed": 7}

    def test_pure_gauge(self, service):
        """Test the N_f = 0 report includes the closed form at n = 1."""
        report = service.expand_z_report(1, 0, seed=3)
        assert not _failed(report)
        assert report.results["gamma"] == 4
        assert any("1/(2 a^2 eps1^2)" in c.description for c in report.checks)

    def test_seed_is_recorded(self, service):
        """Test the random point depends only on the seed."""
        first = service.expand_z_report(1, 1, seed=11)
        second = service.expand_z_report(1, 1, seed=11)
        point = [c.details for c in first.checks if "seed" in c.details]
        assert point == [c.details for c in second.checks if "seed" in c.details]


@pytest.mark.slow
def test_verify_all(service):
    """Test every suite at small orders."""
    report = service.verify_all(lambda_order=2, t_order=5, xz_degree=8, seed=1)
    assert report.results["failed_suites"] == []
    assert report.passed
