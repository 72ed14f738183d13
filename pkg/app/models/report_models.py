"""
Pydantic models for computation reports.
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

REPORT_SCHEMA_VERSION = 1


class IdentityCheck(BaseModel):
    """Outcome of one asserted identity."""
    tag: str = Field(..., description="Identity tag, e.g. eq:coeff")
    description: str = Field(..., description="What was compared")
    passed: bool = Field(..., description="Whether both sides agree within the window")
    first_mismatch: Optional[str] = Field(None, description="Grade of the first differing coefficient")
    lhs: Optional[Any] = Field(None, description="Left coefficient at the first mismatch")
    rhs: Optional[Any] = Field(None, description="Right coefficient at the first mismatch")
    details: Dict[str, Any] = Field(default_factory=dict, description="Extra certificate data")

    class Config:
        json_schema_extra = {
            "example": {
                "tag": "eq:coeff",
                "description": "t^1 coefficient of the c1 = C blow-up ratio equals -Lambda",
                "passed": True,
                "first_mismatch": None,
                "details": {"lambda_order": 9}
            }
        }


class ComputationReport(BaseModel):
    """JSON report emitted by the CLI and the compute endpoint."""
    schema_version: int = Field(default=REPORT_SCHEMA_VERSION, alias="schema")
    command: str = Field(..., description="Command that produced the report")
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Effective orders and inputs")
    checks: List[IdentityCheck] = Field(default_factory=list, description="Every asserted identity")
    results: Dict[str, Any] = Field(default_factory=dict, description="Serialized series and values")

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_json_dict(self) -> Dict[str, Any]:
        payload = self.model_dump(by_alias=True)
        payload["passed"] = self.passed
        return payload

    class Config:
        populate_by_name = True
        json_schema_extra = {
            "example": {
                "schema": 1,
                "command": "blowup-ratio",
                "parameters": {"c1": 1, "t_order": 7, "lambda_order": 2},
                "checks": [],
                "results": {}
            }
        }
