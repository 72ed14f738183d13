"""
Pydantic models for run configurations shared by the CLI and the compute endpoint.
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator, validator

from app.config import get_settings


class Command(str, Enum):
    """Computations and verification suites."""
    EXPAND_Z = "expand-z"
    PREPOTENTIAL = "prepotential"
    BLOWUP_RATIO = "blowup-ratio"
    SW_IDENTITIES = "sw-identities"
    MOCHIZUKI_RESIDUES = "mochizuki-residues"
    WITTEN = "witten"
    SCST = "scst"
    TORIC_BRIDGE = "toric-bridge"
    VERIFY_ALL = "verify-all"


SURFACE_COMMANDS = {Command.MOCHIZUKI_RESIDUES, Command.WITTEN, Command.SCST}


class RunConfig(BaseModel):
    """One run of the engine."""
    command: Command = Field(..., description="Command to run")
    lambda_order: Optional[int] = Field(None, description="Highest instanton number")
    t_order: Optional[int] = Field(None, description="Highest power of the blow-up variable t")
    xz_degree: Optional[int] = Field(None, description="Weighted (x, z)-degree D")
    surface: Optional[str] = Field(None, description="Surface catalogue name or path to surface JSON")
    out: Optional[str] = Field(None, description="Write the JSON report to this path")
    workers: Optional[int] = Field(None, description="Worker threads for fixed-point and residue sums")
    seed: Optional[int] = Field(None, description="Seed for randomized property checks")
    c1: int = Field(default=1, description="First Chern class on the exceptional curve: 0 or 1 (times C)")
    flavours: int = Field(default=1, description="Number of fundamental matters N_f")
    xi1_degree: int = Field(default=0, description="xi_1 as a multiple of H on P^2")
    xi_degree: int = Field(default=1, description="xi as a multiple of H on P^2")
    json_output: bool = Field(default=False, alias="json", description="Print the full report instead of a summary")

    class Config:
        populate_by_name = True
        json_schema_extra = {
            "example": {
                "command": "blowup-ratio",
                "c1": 1,
                "t_order": 7,
                "lambda_order": 3
            }
        }

    @validator("lambda_order")
    def check_lambda_order(cls, v):
        """Instanton number within the configured resource bound"""
        if v is not None and not 0 < v <= get_settings().max_instanton_number:
            raise ValueError(f"lambda_order must lie in 1..{get_settings().max_instanton_number}")
        return v

    @validator("t_order")
    def check_t_order(cls, v):
        """t-order within the configured resource bound"""
        if v is not None and not 0 < v <= get_settings().max_t_order:
            raise ValueError(f"t_order must lie in 1..{get_settings().max_t_order}")
        return v

    @validator("xz_degree")
    def check_xz_degree(cls, v):
        """(x, z)-degree within the configured resource bound"""
        if v is not None and not 0 < v <= get_settings().max_xz_degree:
            raise ValueError(f"xz_degree must lie in 1..{get_settings().max_xz_degree}")
        return v

    @validator("workers")
    def check_workers(cls, v):
        if v is not None and v <= 0:
            raise ValueError("workers must be positive")
        return v

    @validator("c1", "flavours")
    def check_binary(cls, v):
        if v not in (0, 1):
            raise ValueError("must be 0 or 1")
        return v

    @model_validator(mode="after")
    def check_surface(self):
        """Residue commands need surface data"""
        if self.command in SURFACE_COMMANDS and not self.surface:
            raise ValueError(f"{self.command.value} needs --surface")
        return self
