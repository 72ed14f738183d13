"""
Batch front end: run one computation or verification suite and emit its
JSON report.

    python -m app.cli blowup-ratio --c1 1 --t-order 7 --lambda-order 3 --json

Exit status: 0 when every asserted identity holds, 1 on an identity failure,
2 on invalid input. Logs go to stderr; stdout carries only the report.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import ValidationError

from app.config import get_settings
from app.core.exceptions import ComputationError, IdentityMismatch, InvalidInputError, SurfaceDataError
from app.core.logging_config import setup_logging
from app.models.report_models import ComputationReport
from app.models.run_models import Command, RunConfig
from app.services.blowup_service import get_blowup_service
from app.services.mochizuki_service import get_mochizuki_service
from app.services.prepotential_service import get_prepotential_service
from app.services.swcurve_service import get_swcurve_service
from app.services.toric_service import get_toric_service
from app.services.verification_service import get_verification_service
from app.utils.helpers import canonical_json

logger = logging.getLogger(__name__)
settings = get_settings()

EXIT_OK = 0
EXIT_IDENTITY_FAILURE = 1
EXIT_INVALID_INPUT = 2


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="python -m app.cli",
        description="Exact computations around the rank-two N_f = 1 partition function.",
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="Computation or suite to run")
    parser.add_argument("--lambda-order", type=int, default=None, help="Highest instanton number")
    parser.add_argument("--t-order", type=int, default=None, help="Highest power of t in blow-up series")
    parser.add_argument("--xz-degree", type=int, default=None, help="Weighted (x, z)-degree D")
    parser.add_argument("--surface", default=None, help="Surface catalogue name or path to surface JSON")
    parser.add_argument("--out", default=None, help="Write the JSON report to this path")
    parser.add_argument("--workers", type=int, default=None, help="Worker threads")
    parser.add_argument("--seed", type=int, default=None, help="Seed for randomized checks")
    parser.add_argument("--c1", type=int, default=1, help="c1 = k C on the blow-up, k in {0, 1}")
    parser.add_argument("--flavours", type=int, default=1, help="N_f in {0, 1} for expand-z")
    parser.add_argument("--xi1-degree", type=int, default=0, help="xi_1 = d H for toric-bridge")
    parser.add_argument("--xi-degree", type=int, default=1, help="xi = d H for toric-bridge")
    parser.add_argument("--json", action="store_true", help="Print the full JSON report")
    return parser.parse_args(argv)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        lambda_order=args.lambda_order,
        t_order=args.t_order,
        xz_degree=args.xz_degree,
        surface=args.surface,
        out=args.out,
        workers=args.workers,
        seed=args.seed,
        c1=args.c1,
        flavours=args.flavours,
        xi1_degree=args.xi1_degree,
        xi_degree=args.xi_degree,
        json=args.json,
    )


def build_report(config: RunConfig) -> ComputationReport:
    """Dispatch a run configuration to its service."""
    if config.workers:
        settings.worker_count = config.workers
    command = config.command
    if command is Command.EXPAND_Z:
        return get_verification_service().expand_z_report(config.lambda_order, config.flavours, config.seed)
    if command is Command.PREPOTENTIAL:
        return get_prepotential_service().report(config.lambda_order)
    if command is Command.BLOWUP_RATIO:
        return get_blowup_service().report(config.c1, config.t_order, config.lambda_order)
    if command is Command.SW_IDENTITIES:
        return get_swcurve_service().report(config.t_order, config.lambda_order)
    if command is Command.MOCHIZUKI_RESIDUES:
        return get_mochizuki_service().residues_report(config.surface, config.xz_degree)
    if command is Command.WITTEN:
        return get_mochizuki_service().witten_report(config.surface, config.xz_degree)
    if command is Command.SCST:
        return get_mochizuki_service().scst_report(config.surface, config.xz_degree)
    if command is Command.TORIC_BRIDGE:
        return get_toric_service().report(config.lambda_order, config.xi1_degree, config.xi_degree)
    return get_verification_service().verify_all(
        config.lambda_order, config.t_order, config.xz_degree, config.seed
    )


def run(config: RunConfig) -> Tuple[int, Optional[ComputationReport]]:
    """
    Run one configuration.

    Returns:
        Exit status and the report (None when no report was produced)
    """
    try:
        report = build_report(config)
    except (SurfaceDataError, InvalidInputError) as e:
        logger.error(f"Invalid input for {config.command.value}: {str(e)}")
        return EXIT_INVALID_INPUT, None
    except IdentityMismatch as e:
        logger.error(f"{config.command.value} aborted: {str(e)}")
        return EXIT_IDENTITY_FAILURE, None
    except ComputationError as e:
        logger.error(f"{config.command.value} failed: {type(e).__name__}: {str(e)}")
        return EXIT_IDENTITY_FAILURE, None
    if config.out:
        path = Path(config.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(canonical_json(report.to_json_dict()) + "\n", encoding="utf-8")
        logger.info(f"Report written to {path}")
    return (EXIT_OK if report.passed else EXIT_IDENTITY_FAILURE), report


def _print_summary(report: ComputationReport) -> None:
    failed = [c for c in report.checks if not c.passed]
    status = "OK" if not failed else f"FAIL ({len(failed)} failed)"
    print(f"[{report.command}] {status} (checks={len(report.checks)})")
    for check in failed:
        print(f"  - {check.tag}: {check.description} at {check.first_mismatch}")


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging(stream=sys.stderr)
    args = _parse_args(argv)
    try:
        config = _config_from_args(args)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {str(e)}")
        print(f"[error] {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    status, report = run(config)
    if report is None:
        print(f"[error] {config.command.value} did not produce a report; see the log", file=sys.stderr)
        return status
    if config.json_output:
        print(canonical_json(report.to_json_dict()))
    else:
        _print_summary(report)
    return status


if __name__ == "__main__":
    sys.exit(main())
