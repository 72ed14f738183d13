"""
Unit tests for the phi-variable algebra.
"""
import random
from fractions import Fraction

import pytest

from app.config import get_settings
from app.core.exactalg import to_qq
from app.core.exceptions import ComputationError, ParityViolation
from app.core.phiforms import (
    PhiElement,
    alpha_weight,
    alpha_ring,
    parity_defects,
    phi_ring,
    project_parity,
    rationalize,
    reduce_roots,
    transfer,
    truncated_exp,
    v_ring,
    xz_weight,
)

BASIS = ("H",)


def _gens():
    ring = phi_ring(BASIS)
    return ring, dict(zip((str(s) for s in ring.symbols), ring.gens))


class TestReduction:
    """Tests for the root relations."""

    def test_root_squares(self):
        """Test s1^2 = 1 - phi^4, s2^2 = 1 - 3 phi^4, r2^2 = 2 and phi psi = 1."""
        ring, g = _gens()
        assert reduce_roots(g["s1"] ** 2) == 1 - g["phi"] ** 4
        assert reduce_roots(g["s2"] ** 2) == 1 - 3 * g["phi"] ** 4
        assert reduce_roots(g["r2"] ** 3) == 2 * g["r2"]
        assert reduce_roots(g["phi"] ** 5 * g["psi"] ** 2) == g["phi"] ** 3
        assert reduce_roots(g["phi"] * g["psi"] ** 3) == g["psi"] ** 2

    def test_parity_projection(self):
        """Test only x^k z^l with 2k + l = p mod 4 survive."""
        ring, g = _gens()
        x, z = g["x"], g["z"]
        poly = 1 + x + z + x * z + z ** 4
        assert project_parity(poly, 0) == 1 + z ** 4
        assert project_parity(poly, 2) == x
        assert project_parity(poly, 3) == x * z

    def test_projections_partition(self):
        """Test the four parity projections of a random form sum back to it and are disjoint."""
        rng = random.Random(get_settings().random_seed)
        ring, g = _gens()
        for _ in range(20):
            poly = ring.zero
            for _ in range(rng.randint(1, 8)):
                term = g["x"] ** rng.randint(0, 4) * g["z"] ** rng.randint(0, 6) * g["phi"] ** rng.randint(0, 5)
                if rng.random() < 0.5:
                    term = term * g["s1"]
                poly += term * to_qq(Fraction(rng.randint(-9, 9), rng.randint(1, 6)))
            parts = [project_parity(poly, p) for p in range(4)]
            assert sum(parts, ring.zero) == poly
            for p in range(4):
                assert project_parity(parts[p], p) == parts[p]
                assert not project_parity(parts[p], (p + 1) % 4)

    def test_truncated_exp(self):
        """Test exp(z) through weight 3."""
        ring, g = _gens()
        z = g["z"]
        result = truncated_exp(z, 3, xz_weight(ring))
        assert result * 6 == 6 + 6 * z + 3 * z ** 2 + z ** 3

    def test_truncated_exp_needs_positive_weight(self):
        """Test a weight-zero exponent is rejected."""
        ring, g = _gens()
        with pytest.raises(ComputationError):
            truncated_exp(g["phi"], 3, xz_weight(ring))

    def test_alpha_weight(self):
        """Test A2 counts twice and b_H once."""
        ring = alpha_ring(BASIS)
        a2, b = ring.gens
        weight = alpha_weight(ring)
        ((monom, _),) = (a2 * b ** 3).terms()
        assert weight(monom) == 5

    def test_transfer_drops_generators(self):
        """Test moving between rings by generator name."""
        ring, g = _gens()
        target = v_ring(BASIS)
        assert transfer(g["x"] * g["b_H"], target) == target.gens[1] * target.gens[4]
        with pytest.raises(ComputationError):
            transfer(g["phi"], target)
        assert transfer(g["phi"] * g["x"], target, drop=("phi",)) == target.gens[1]


class TestPhiElement:
    """Tests for differentials in phi."""

    def test_branch_flip(self):
        """Test s2 -> -s2 negates the s2 component only."""
        ring, g = _gens()
        element = PhiElement(g["s1"] + g["s2"])
        assert element.flip().numer == g["s1"] - g["s2"]
        assert element.flip(s1=True, s2=False).numer == -g["s1"] + g["s2"]

    def test_components(self):
        """Test the split along 1, s1, s2 and s1 s2."""
        ring, g = _gens()
        components = PhiElement(g["x"] + g["s1"] * g["s2"] * g["z"]).components()
        assert components["1"] == g["x"]
        assert components["s1s2"] == g["z"]
        assert not components["s1"]

    def test_addition_lifts_denominators(self):
        """Test elements with different pole orders add over a common denominator."""
        ring, g = _gens()
        total = PhiElement(ring.one, at_one=1) + PhiElement(ring.one, at_one=2)
        assert total.at_one == 2
        assert total.numer == 2 - g["phi"] ** 4

    def test_rationalize(self):
        """Test phi^4 x dphi/phi / (1 - v) becomes x v dv / (4 v (1 - v))."""
        ring, g = _gens()
        target = v_ring(BASIS)
        v, x = target.gens[0], target.gens[1]
        form = rationalize(PhiElement(g["phi"] ** 4 * g["x"]), target)
        assert form.numer == v * x
        assert form.denom == 4 * v * (1 - v)

    def test_parity_defects(self):
        """Test each offending monomial is listed once and clean forms list none."""
        ring, g = _gens()
        assert parity_defects(PhiElement(g["phi"] ** 4 * g["x"] + g["psi"] ** 8)) == []
        defects = parity_defects(PhiElement(g["s1"] + g["phi"] ** 2 + g["phi"] ** 4))
        assert len(defects) == 2
        assert sum("odd root" in d for d in defects) == 1
        assert sum("multiple of 4" in d for d in defects) == 1

    def test_rationalize_rejects_odd_roots(self):
        """Test surviving root components are a parity violation."""
        ring, g = _gens()
        with pytest.raises(ParityViolation, match="odd root"):
            rationalize(PhiElement(g["s1"]), v_ring(BASIS))
        with pytest.raises(ParityViolation, match="multiple of 4"):
            rationalize(PhiElement(g["phi"] ** 2), v_ring(BASIS))
