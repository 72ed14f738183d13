"""
Helper utility functions
"""

import json
import logging
from typing import Any, Dict, Iterable, List, Optional

from app.core.exactalg import GradedSeries, format_coefficient
from app.core.exceptions import IdentityMismatch
from app.core.metrics import get_metrics_collector
from app.models.report_models import IdentityCheck

logger = logging.getLogger(__name__)


def _locate(lhs: GradedSeries, rhs: GradedSeries) -> Optional[List[str]]:
    """Path of grades to the first differing coefficient of two (nested) series."""
    index = lhs.first_difference(rhs)
    if index is None:
        return None
    path = [f"{lhs.variable}^{lhs.grade(index)}"]
    left, right = lhs.terms.get(index, 0), rhs.terms.get(index, 0)
    if isinstance(left, GradedSeries) and isinstance(right, GradedSeries):
        inner = _locate(left, right)
        if inner:
            path.extend(inner)
    return path


def compare_series(tag: str, description: str, lhs: GradedSeries, rhs: GradedSeries,
                   details: Optional[Dict[str, Any]] = None) -> IdentityCheck:
    """
    Compare two series inside their common truncation window.

    Args:
        tag: Identity tag
        description: Human readable statement of the identity
        lhs: Left-hand side
        rhs: Right-hand side
        details: Extra data recorded in the certificate

    Returns:
        IdentityCheck with the first differing coefficient on failure
    """
    path = _locate(lhs, rhs)
    check = IdentityCheck(tag=tag, description=description, passed=path is None, details=details or {})
    if path is not None:
        index = lhs.first_difference(rhs)
        check.first_mismatch = " ".join(path)
        check.lhs = format_coefficient(lhs.terms.get(index, 0))
        check.rhs = format_coefficient(rhs.terms.get(index, 0))
        logger.warning(f"Identity {tag} failed at {check.first_mismatch}")
    get_metrics_collector().record_identity(tag, check.passed)
    return check


def compare_values(tag: str, description: str, lhs: Any, rhs: Any,
                   details: Optional[Dict[str, Any]] = None) -> IdentityCheck:
    """Compare two exact values (polynomials, rationals, scalars)."""
    passed = not (lhs - rhs)
    check = IdentityCheck(tag=tag, description=description, passed=passed, details=details or {})
    if not passed:
        check.first_mismatch = "value"
        check.lhs = format_coefficient(lhs)
        check.rhs = format_coefficient(rhs)
        logger.warning(f"Identity {tag} failed: {lhs} != {rhs}")
    get_metrics_collector().record_identity(tag, passed)
    return check


def flag(tag: str, description: str, passed: bool, details: Optional[Dict[str, Any]] = None) -> IdentityCheck:
    """Record a boolean verdict as an identity check."""
    get_metrics_collector().record_identity(tag, passed)
    return IdentityCheck(tag=tag, description=description, passed=passed, details=details or {})


def require(checks: Iterable[IdentityCheck]) -> None:
    """Raise IdentityMismatch on the first failed check."""
    for check in checks:
        if not check.passed:
            raise IdentityMismatch(check.tag, check.first_mismatch, check.lhs, check.rhs)


def canonical_json(payload: Dict[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, fixed separators."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
