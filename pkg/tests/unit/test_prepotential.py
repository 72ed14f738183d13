"""
Unit tests for the epsilon-expansion and the a = m identities.
"""
import pytest

from app.core.exactalg import generator
from app.core.nekrasov import GaugeParams, zinst
from app.services.prepotential_service import LOG_LAMBDA, PrepotentialService, am_field


@pytest.fixture(scope="module")
def service():
    return PrepotentialService()


@pytest.fixture(scope="module")
def expansion(service):
    return service.expansion(2)


class TestEpsilonExpansion:
    """Tests for F0, H, A and B."""

    def test_one_instanton_prepotential(self, expansion):
        """Test F0 at Lambda^3 is -m/(2a^2)."""
        fld = am_field()
        a, m = generator(fld, "a"), generator(fld, "m")
        assert expansion.f0.coefficient(3) == -m / (a ** 2 * 2)
        assert expansion.gamma == 3
        assert expansion.precision == 9

    def test_h_vanishes(self, expansion):
        """Test the odd epsilon term is absent."""
        assert not expansion.h

    def test_rays_agree_with_generic_expansion(self, service, expansion):
        """Test the two-ray extraction matches the Taylor expansion of log Z over QQ(e1, e2, a, m)."""
        generic = service.expand_log(zinst(GaugeParams(flavours=1), 2))
        for name, series in expansion.components().items():
            assert generic.components()[name].first_difference(series) is None, name

    def test_reconstruction_on_third_ray(self, service):
        """Test the expansion predicts log Z on eps2 = -3 eps1."""
        assert service.reconstruction_check(2).passed

    def test_u_series(self, service, expansion):
        """Test u = a^2 + m/(2a^2) Lambda^3 + O(Lambda^6)."""
        fld = am_field()
        a, m = generator(fld, "a"), generator(fld, "m")
        u = service.u_series(expansion)
        assert u.coefficient(0) == a ** 2
        assert u.coefficient(3) == m / (a ** 2 * 2)

    def test_unknown_derivative(self, service, expansion):
        """Test derivatives only in a, m and log Lambda."""
        assert service.deriv(expansion.f0, LOG_LAMBDA).coefficient(3) == expansion.f0.coefficient(3) * 3
        with pytest.raises(ValueError, match="unknown derivative"):
            service.deriv(expansion.f0, "u")


class TestAEqualsM:
    """Tests for the specialization m = a."""

    def test_contact_term_leading(self, service, expansion):
        """Test T = Lambda^3/(2a) + O(Lambda^6)."""
        a = generator(am_field(), "a")
        assert service.contact_term(expansion).coefficient(3) == 1 / (a * 2)

    def test_q_routes_agree(self, service, expansion):
        """Test the division and derivative routes to q_inst^2 agree."""
        routes = service.qinst_squared_am(expansion)
        assert routes["division"].first_difference(routes["derivative"]) is None

    @pytest.mark.slow
    def test_report_passes(self, service):
        """Test every identity of the prepotential report holds."""
        report = service.report(2)
        failed = [c.tag for c in report.checks if not c.passed]
        assert not failed
        assert report.command == "prepotential"
        assert "T" in report.results
