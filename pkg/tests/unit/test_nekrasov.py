"""
Unit tests for the fixed-point sum of the instanton partition function.
"""
import pytest
from fractions import Fraction

from app.core.exactalg import generator, polynomial_ring, specialize, to_qq
from app.core.exceptions import ConventionError
from app.core.nekrasov import (
    ChartPoint,
    GaugeParams,
    chart_coefficients,
    fixed_point_term,
    generic_field,
    matter_weights,
    tangent_weights,
    zinst,
    zinst_ch2_insertion,
)
from app.core.partitions import YoungDiagram, YoungPair, enumerate_pairs


def _gens():
    fld = generic_field()
    return fld, [generator(fld, name) for name in ("e1", "e2", "a", "m")]


BOX = YoungDiagram((1,))
EMPTY = YoungDiagram()


class TestGaugeParams:
    """Tests for the gauge data."""

    def test_gamma(self):
        """Test gamma = 4 - N_f."""
        assert GaugeParams(flavours=1).gamma == 3
        assert GaugeParams(flavours=0).gamma == 4

    def test_unsupported(self):
        """Test only N_f in {0, 1} and rank two are accepted."""
        with pytest.raises(ValueError):
            GaugeParams(flavours=2)
        with pytest.raises(ValueError):
            GaugeParams(rank=3)


class TestWeights:
    """Tests for tangent and matter weights."""

    def test_weight_counts(self):
        """Test 4n tangent weights and n matter weights per fixed point."""
        for pair in enumerate_pairs(3):
            assert len(tangent_weights(pair)) == 12
            assert len(matter_weights(pair, 1)) == 3
            assert matter_weights(pair, 0) == ()

    def test_single_box_terms(self):
        """Test both n = 1 fixed points against the closed form."""
        _, (e1, e2, a, m) = _gens()
        s = e1 + e2
        g = GaugeParams(flavours=1)
        left = fixed_point_term(YoungPair(BOX, EMPTY), g)
        right = fixed_point_term(YoungPair(EMPTY, BOX), g)
        assert left == (m - a - s / 2) / (e1 * e2 * (-a * 2) * (a * 2 + s))
        assert right == (m + a - s / 2) / (e1 * e2 * (a * 2) * (s - a * 2))


class TestPartitionFunction:
    """Tests for Z^inst as a Lambda-series."""

    def test_grading(self):
        """Test Z^inst = 1 + O(Lambda^gamma) with terms only at multiples of gamma."""
        z = zinst(GaugeParams(flavours=1), 2)
        assert z.precision == 9
        assert z.coefficient(0) == 1
        assert set(z.terms) <= {0, 3, 6}

    def test_pure_theory_on_slice(self):
        """Test N_f = 0, n = 1 at eps2 = -eps1 equals 1/(2 a^2 eps1^2)."""
        _, (e1, _, a, _) = _gens()
        z = zinst(GaugeParams(flavours=0), 1)
        assert specialize(z.coefficient(4), "e2", -e1) == 1 / (a ** 2 * e1 ** 2 * 2)

    def test_pure_theory_first_coefficient(self):
        """Test Z_1 = 2/(eps1 eps2 ((eps1 + eps2)^2 - 4 a^2)) for N_f = 0."""
        _, (e1, e2, a, _) = _gens()
        z = zinst(GaugeParams(flavours=0), 1)
        assert z.coefficient(4) == 2 / (e1 * e2 * ((e1 + e2) ** 2 - a ** 2 * 4))

    def test_workers_agree(self):
        """Test the threaded sum matches the serial one."""
        g = GaugeParams(flavours=1)
        assert zinst(g, 2, workers=3) == zinst(g, 2)

    def test_insertion_power_zero(self):
        """Test the power-0 insertion is Z^inst itself."""
        g = GaugeParams(flavours=1)
        assert zinst_ch2_insertion(g, 0, 2) == zinst(g, 2)

    def test_negative_order(self):
        """Test negative orders are rejected."""
        with pytest.raises(ValueError):
            zinst(GaugeParams(), -1)


class TestChart:
    """Tests for the restriction to a ray in the epsilon plane."""

    def test_leading_pole(self):
        """Test Z_1 = m/(4 h^2) + O(1/h) on eps1 = h, eps2 = -2h, a = 1."""
        ring = polynomial_ring(("m",))
        m0 = ring.gens[0]
        chart = ChartPoint(e1=Fraction(1), e2=Fraction(-2), ring=ring, m0=m0)
        coefficients = chart_coefficients(GaugeParams(flavours=1), chart, 1, depth=3)
        assert coefficients[0].coefficient(0) == 1
        assert coefficients[1].coefficient(-2) == m0 * to_qq(Fraction(1, 4))

    def test_zero_coulomb_parameter(self):
        """Test a chart needs a nonzero Coulomb parameter."""
        ring = polynomial_ring(("m",))
        with pytest.raises(ConventionError):
            ChartPoint(e1=Fraction(1), e2=Fraction(-2), ring=ring, m0=ring.gens[0], a0=Fraction(0))

    def test_vanishing_weight_on_ray(self):
        """Test a ray on which a pure tangent weight vanishes is rejected."""
        ring = polynomial_ring(("m",))
        chart = ChartPoint(e1=Fraction(1), e2=Fraction(0), ring=ring, m0=ring.gens[0])
        with pytest.raises(ConventionError, match="vanishes"):
            chart_coefficients(GaugeParams(flavours=1), chart, 1, depth=3)
