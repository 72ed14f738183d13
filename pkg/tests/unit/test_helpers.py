"""
Unit tests for identity comparison helpers, metrics and settings.
"""
import json

import pytest
from fractions import Fraction
from pydantic import ValidationError

from app.config import Settings
from app.core.exactalg import GradedSeries
from app.core.exceptions import IdentityMismatch
from app.core.metrics import MetricsCollector
from app.utils.helpers import canonical_json, compare_series, compare_values, flag, require


class TestCompareSeries:
    """Tests for series comparison."""

    def test_equal_within_window(self):
        """Test differences beyond the shorter window are ignored."""
        lhs = GradedSeries("L", {0: 1, 1: 2}, precision=2)
        rhs = GradedSeries("L", {0: 1, 1: 2, 2: 7}, precision=3)
        assert compare_series("eq:sum", "window", lhs, rhs).passed

    def test_nested_mismatch_path(self):
        """Test the first mismatch is located through nested series."""
        lhs = GradedSeries("t", {1: GradedSeries("L", {1: -1, 2: 3}, precision=4)}, precision=3)
        rhs = GradedSeries("t", {1: GradedSeries("L", {1: -1}, precision=4)}, precision=3)
        check = compare_series("eq:coeff", "nested", lhs, rhs)
        assert not check.passed
        assert check.first_mismatch == "t^1 L^2"

    def test_compare_values(self):
        """Test exact value comparison records both sides."""
        assert compare_values("x", "equal", Fraction(1, 2), Fraction(2, 4)).passed
        check = compare_values("x", "unequal", Fraction(1, 2), Fraction(1, 3))
        assert check.lhs == {"num": "1", "den": "2"}
        assert check.rhs == {"num": "1", "den": "3"}


class TestRequire:
    """Tests for aborting on failed checks."""

    def test_passing_checks(self):
        """Test passing checks return silently."""
        require([flag("a", "ok", True)])

    def test_first_failure_raises(self):
        """Test the first failed check becomes an IdentityMismatch."""
        checks = [flag("a", "ok", True), compare_values("b", "bad", Fraction(1), Fraction(2))]
        with pytest.raises(IdentityMismatch) as exc:
            require(checks)
        assert exc.value.tag == "b"
        assert exc.value.index == "value"


def test_canonical_json_sorts_keys():
    """Test the canonical JSON text is independent of insertion order."""
    assert canonical_json({"b": 1, "a": 2}) == canonical_json({"a": 2, "b": 1})
    assert list(json.loads(canonical_json({"b": 1, "a": 2}))) == ["a", "b"]


class TestMetricsCollector:
    """Tests for computation and identity metrics."""

    def test_timed_success_and_failure(self):
        """Test timed blocks record successes and errors."""
        metrics = MetricsCollector()
        with metrics.timed("expand_z"):
            pass
        with pytest.raises(RuntimeError):
            with metrics.timed("expand_z"):
                raise RuntimeError("boom")
        summary = metrics.get_computation_metrics("expand_z")
        assert summary["count"] == 2
        assert summary["successes"] == 1
        assert summary["error_rate"] == 0.5
        assert "avg_time" in summary

    def test_identity_counts(self):
        """Test identity outcomes are counted per tag."""
        metrics = MetricsCollector()
        metrics.record_identity("eq:coeff", True)
        metrics.record_identity("eq:coeff", False)
        entry = metrics.get_metrics()["identity_eq:coeff"]
        assert (entry["count"], entry["passed"], entry["failed"]) == (2, 1, 1)

    def test_reset(self):
        """Test reset clears everything."""
        metrics = MetricsCollector()
        metrics.record_computation("verify_all", 1.0)
        metrics.reset()
        assert metrics.get_metrics() == {}
        assert metrics.get_computation_metrics("verify_all") == {}


class TestSettings:
    """Tests for settings validation."""

    def test_cors_origins_from_string(self):
        """Test comma separated origins are split."""
        settings = Settings(cors_origins="http://a, http://b")
        assert settings.cors_origins == ["http://a", "http://b"]

    def test_log_level_normalized(self):
        """Test the log level is upper-cased."""
        assert Settings(log_level="debug").log_level == "DEBUG"

    def test_bounds_positive(self):
        """Test orders and bounds must be positive."""
        with pytest.raises(ValidationError, match="must be positive"):
            Settings(max_instanton_number=0)
        with pytest.raises(ValidationError):
            Settings(worker_count=-1)
