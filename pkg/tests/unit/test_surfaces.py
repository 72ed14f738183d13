"""
Unit tests for surface data loading and validation.
"""
import json

import pytest
from pydantic import ValidationError

from app.core.exceptions import SurfaceDataError
from app.models.surface_models import SurfaceData, load_surface, shipped_surfaces


def _quintic(**overrides):
    payload = {
        "name": "quintic",
        "chi_h": 5,
        "gram": [[5]],
        "basis": ["H"],
        "canonical": [1],
        "basic_classes": [
            {"label": "K", "coordinates": [1], "sw": -1},
            {"label": "-K", "coordinates": [-1], "sw": 1},
        ],
        "xi": {"0": [0], "H": [1]},
    }
    payload.update(overrides)
    return payload


class TestSurfaceData:
    """Tests for the surface model."""

    def test_valid_surface(self):
        """Test the quintic lattice data."""
        surface = SurfaceData(**_quintic())
        assert surface.rank == 1
        assert surface.ksq == 5
        assert surface.dimension_mod4([0]) == 1
        assert surface.pairing_row([1], [1]) == {"n1": 0, "xi_minus_k_sq": 0, "sign": 5}

    def test_virtual_euler(self):
        """Test chi(y) = (xi, xi - K)/2 + 2 chi_h - n."""
        surface = SurfaceData(**_quintic())
        # weight 1 means 4n = 1 + 0 + 15, n = 4
        assert surface.virtual_euler([0], 1) == 6
        with pytest.raises(SurfaceDataError):
            surface.virtual_euler([0], 2)

    def test_non_symmetric_gram(self):
        """Test the Gram matrix must be symmetric."""
        with pytest.raises(ValidationError, match="symmetric"):
            SurfaceData(**_quintic(gram=[[0, 1], [2, 0]], basis=["a", "b"], canonical=[0, 0],
                                   basic_classes=[{"label": "0", "coordinates": [0, 0], "sw": 1}],
                                   xi={"0": [0, 0]}))

    def test_simple_type(self):
        """Test every basic class squares to K^2."""
        classes = [{"label": "3K", "coordinates": [3], "sw": 1}]
        with pytest.raises(ValidationError, match="simple type"):
            SurfaceData(**_quintic(basic_classes=classes))

    def test_sw_symmetry(self):
        """Test SW(-c) = (-1)^chi_h SW(c)."""
        classes = [
            {"label": "K", "coordinates": [1], "sw": 1},
            {"label": "-K", "coordinates": [-1], "sw": 1},
        ]
        with pytest.raises(ValidationError, match="chi_h"):
            SurfaceData(**_quintic(basic_classes=classes))

    def test_zero_invariant(self):
        """Test basic classes carry SW != 0."""
        classes = [{"label": "K", "coordinates": [1], "sw": 0}]
        with pytest.raises(ValidationError):
            SurfaceData(**_quintic(basic_classes=classes))

    def test_unknown_xi(self):
        """Test asking for an xi the data does not list."""
        surface = SurfaceData(**_quintic())
        with pytest.raises(SurfaceDataError, match="no xi"):
            surface.xi_class("E")


class TestLoadSurface:
    """Tests for the surface catalogue."""

    def test_shipped_catalogue(self):
        """Test every shipped surface validates."""
        names = shipped_surfaces()
        assert {"k3", "quintic", "quintic_blowup", "artificial"} <= set(names)
        for name in names:
            assert load_surface(name).name == name

    def test_missing_surface(self):
        """Test an unknown catalogue name."""
        with pytest.raises(SurfaceDataError, match="not found"):
            load_surface("enriques")

    def test_malformed_json(self, tmp_path):
        """Test a file that is not JSON."""
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(SurfaceDataError, match="not valid JSON"):
            load_surface(str(path))

    def test_invalid_payload(self, tmp_path):
        """Test a JSON file whose exceptional index is not a (-1)-class."""
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(_quintic(exceptional=0)), encoding="utf-8")
        with pytest.raises(SurfaceDataError, match="invalid surface data"):
            load_surface(str(path))
