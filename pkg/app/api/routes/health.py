"""
Health check endpoints
"""

from fastapi import APIRouter, status
from pydantic import BaseModel
from typing import Dict, Any
import logging

from app.config import get_settings
from app.core.metrics import get_metrics_collector
from app.models.surface_models import shipped_surfaces

router = APIRouter()
logger = logging.getLogger(__name__)
settings = get_settings()

VERSION = "1.0.0"


class HealthResponse(BaseModel):
    """Health check response model"""
    status: str
    version: str
    environment: str


class DetailedHealthResponse(BaseModel):
    """Readiness with the state of the data and limits"""
    status: str
    version: str
    environment: str
    services: Dict[str, Any]


@router.get("/", response_model=HealthResponse, status_code=status.HTTP_200_OK)
async def health_check():
    """
    Basic health check endpoint
    Returns simple status of the application
    """
    return HealthResponse(
        status="healthy",
        version=VERSION,
        environment=settings.env
    )


@router.get("/readiness", response_model=DetailedHealthResponse)
async def readiness_check():
    """
    Readiness check - the surface catalogue must be readable
    """
    services_status = {}
    overall_healthy = True

    try:
        surfaces = shipped_surfaces()
        services_status["surfaces"] = {"status": "available", "catalogue": surfaces}
        if not surfaces:
            services_status["surfaces"]["status"] = "empty"
            overall_healthy = False
    except Exception as e:
        services_status["surfaces"] = {"status": "error", "message": str(e)}
        overall_healthy = False

    services_status["limits"] = {
        "max_instanton_number": settings.max_instanton_number,
        "max_t_order": settings.max_t_order,
        "max_xz_degree": settings.max_xz_degree,
        "worker_count": settings.worker_count,
    }

    return DetailedHealthResponse(
        status="healthy" if overall_healthy else "degraded",
        version=VERSION,
        environment=settings.env,
        services=services_status
    )


@router.get("/liveness", status_code=status.HTTP_200_OK)
async def liveness_check():
    """
    Liveness check - verifies application is running
    """
    return {"status": "alive"}


@router.get("/metrics")
async def metrics():
    """Computation counts, durations and identity pass/fail counts"""
    return get_metrics_collector().get_metrics()
