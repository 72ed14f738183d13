"""
Unit tests for the command-line front end.
"""
import json

import pytest
from unittest.mock import patch

from app.cli import EXIT_IDENTITY_FAILURE, EXIT_INVALID_INPUT, EXIT_OK, main
from app.core.exceptions import ConventionError, IdentityMismatch, InvalidInputError
from app.models.report_models import ComputationReport, IdentityCheck


class TestExitStatus:
    """Tests for exit codes."""

    def test_unknown_command(self):
        """Test argparse rejects unknown commands with status 2."""
        with pytest.raises(SystemExit) as exc:
            main(["summarize"])
        assert exc.value.code == EXIT_INVALID_INPUT

    def test_out_of_range_order(self, capsys):
        """Test an order beyond the resource bound."""
        assert main(["prepotential", "--lambda-order", "0"]) == EXIT_INVALID_INPUT
        assert "[error]" in capsys.readouterr().err

    def test_missing_surface(self):
        """Test residue commands without --surface."""
        assert main(["witten"]) == EXIT_INVALID_INPUT

    def test_malformed_surface(self, tmp_path):
        """Test malformed surface JSON exits with status 2."""
        path = tmp_path / "broken.json"
        path.write_text('{"name": "broken", "chi_h": 1', encoding="utf-8")
        assert main(["scst", "--surface", str(path)]) == EXIT_INVALID_INPUT

    @patch("app.cli.build_report")
    def test_identity_mismatch(self, mock_build):
        """Test an aborted computation exits with status 1."""
        mock_build.side_effect = IdentityMismatch("eq:coeff", "t^3", "0", "1")
        assert main(["blowup-ratio"]) == EXIT_IDENTITY_FAILURE

    @patch("app.cli.logger")
    @patch("app.cli.build_report")
    def test_internal_error(self, mock_build, mock_logger, capsys):
        """Test a broken internal invariant exits with status 1 and is logged."""
        mock_build.side_effect = ConventionError("weight vanishes at a chart point")
        assert main(["blowup-ratio"]) == EXIT_IDENTITY_FAILURE
        message = mock_logger.error.call_args[0][0]
        assert "ConventionError" in message
        assert "weight vanishes" in message
        assert "did not produce a report" in capsys.readouterr().err

    @patch("app.cli.build_report")
    def test_invalid_input_error(self, mock_build):
        """Test a rejected argument deep in the engine exits with status 2."""
        mock_build.side_effect = InvalidInputError("c1 must be 0 or C")
        assert main(["blowup-ratio"]) == EXIT_INVALID_INPUT

    @patch("app.cli.build_report")
    def test_plain_value_error_propagates(self, mock_build):
        """Test a ValueError from a library is not reported as invalid input."""
        mock_build.side_effect = ValueError("0**0")
        with pytest.raises(ValueError):
            main(["scst", "--surface", "k3"])

    def test_artificial_scst(self, capsys):
        """Test the artificial data fails its moment check instead of crashing."""
        assert main(["scst", "--surface", "artificial", "--xz-degree", "4", "--json"]) == EXIT_IDENTITY_FAILURE
        payload = json.loads(capsys.readouterr().out)
        assert payload["results"]["superconformal"] is False
        assert payload["results"]["moments"] == {"0": "1"}

    @patch("app.cli.build_report")
    def test_failed_check(self, mock_build, capsys):
        """Test a report with a failed check prints a summary and exits with status 1."""
        mock_build.return_value = ComputationReport(
            command="blowup-ratio",
            checks=[IdentityCheck(tag="eq:coeff", description="t^1 coefficient", passed=False,
                                  first_mismatch="t^1 Lambda^1")],
        )
        assert main(["blowup-ratio"]) == EXIT_IDENTITY_FAILURE
        out = capsys.readouterr().out
        assert "FAIL (1 failed)" in out
        assert "eq:coeff" in out


class TestReports:
    """Tests for JSON output."""

    def test_scst_json(self, capsys):
        """Test the scst report on stdout."""
        assert main(["scst", "--surface", "quintic", "--xz-degree", "4", "--json"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["command"] == "scst"
        assert payload["passed"] is True
        assert payload["results"]["vacuous"] is True

    def test_out_file(self, tmp_path, capsys):
        """Test --out writes the canonical report."""
        out = tmp_path / "reports" / "k3.json"
        assert main(["scst", "--surface", "k3", "--xz-degree", "4", "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text(encoding="utf-8"))
        assert payload["parameters"] == {"surface": "k3", "xz_degree": 4}
        assert "[scst] OK" in capsys.readouterr().out

    @pytest.mark.slow
    def test_blowup_first_coefficient(self, capsys):
        """Test the t^1 entry of the c1 = C ratio is -Lambda."""
        status = main(["blowup-ratio", "--c1", "1", "--t-order", "3", "--lambda-order", "2", "--json"])
        payload = json.loads(capsys.readouterr().out)
        assert status == EXIT_OK
        terms = {entry["exponent"]: entry["coefficient"] for entry in payload["results"]["ratio"]["terms"]}
        first = terms["1"]["terms"]
        assert first[0] == {"exponent": "1", "coefficient": {"num": "-1", "den": "1"}}
