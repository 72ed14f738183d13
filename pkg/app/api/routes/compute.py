"""
Compute endpoints
Run a computation and return the same JSON report the CLI prints
"""

from fastapi import APIRouter, HTTPException, status
from pydantic import BaseModel, Field, ValidationError
from typing import Any, Dict, List, Optional
import logging

from app.cli import build_report
from app.core.exceptions import InvalidInputError
from app.models.run_models import Command, RunConfig
from app.models.surface_models import shipped_surfaces

router = APIRouter()
logger = logging.getLogger(__name__)


class ComputeRequest(BaseModel):
    """Orders and inputs of one run; the command comes from the path"""
    lambda_order: Optional[int] = Field(None, description="Highest instanton number")
    t_order: Optional[int] = Field(None, description="Highest power of t")
    xz_degree: Optional[int] = Field(None, description="Weighted (x, z)-degree D")
    surface: Optional[str] = Field(None, description="Surface catalogue name")
    seed: Optional[int] = Field(None, description="Seed for randomized checks")
    c1: int = Field(default=1, description="c1 = k C on the blow-up")
    flavours: int = Field(default=1, description="N_f for expand-z")
    xi1_degree: int = Field(default=0, description="xi_1 = d H for toric-bridge")
    xi_degree: int = Field(default=1, description="xi = d H for toric-bridge")

    class Config:
        json_schema_extra = {
            "example": {
                "lambda_order": 2,
                "t_order": 5,
                "c1": 1
            }
        }


@router.get("/commands", response_model=List[str])
async def list_commands():
    """Commands accepted by POST /api/compute/{command}"""
    return [c.value for c in Command]


@router.get("/surfaces", response_model=List[str])
async def list_surfaces():
    """Shipped surface data"""
    return shipped_surfaces()


@router.post("/{command}")
def compute(command: Command, request: ComputeRequest) -> Dict[str, Any]:
    """
    Run one computation

    Surface data problems and out-of-range orders answer 422; the report's
    "passed" field says whether every identity held.
    """
    try:
        config = RunConfig(command=command, **request.model_dump())
    except ValidationError as e:
        logger.warning(f"Rejected {command.value} request: {e.errors()}")
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))

    logger.info(f"Compute request: {command.value}")
    try:
        report = build_report(config)
    except InvalidInputError as e:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e))
    return report.to_json_dict()
