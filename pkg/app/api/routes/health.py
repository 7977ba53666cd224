"""
Health Check Endpoints
"""
import math

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse

from app.models import HealthResponse
from core.config import settings
from core.zeta import zeta_complex, zeta_star_residual

router = APIRouter()

SELF_TEST_TOL = 1e-10


def numerical_self_test() -> dict:
    """zeta(2) against pi^2/6 and the functional equation at one point"""
    checks = {"zeta2": False, "zeta_star": False}
    try:
        checks["zeta2"] = abs(zeta_complex(2.0).value - math.pi ** 2 / 6.0) < SELF_TEST_TOL
        checks["zeta_star"] = zeta_star_residual(complex(0.3, 7.0)) < SELF_TEST_TOL
    except Exception:
        pass
    return checks


@router.get("/", response_model=HealthResponse)
async def health_check(request: Request):
    """
    Health check: application status plus the numerical self-test
    """
    services = {"api": True, "verifier": hasattr(request.app.state, "verifier")}
    services.update(numerical_self_test())

    overall_status = "healthy" if all(services.values()) else "degraded"

    return HealthResponse(
        status=overall_status,
        services=services,
        version=settings.APP_VERSION
    )


@router.get("/liveness")
async def liveness():
    """Liveness probe"""
    return {"status": "alive"}


@router.get("/readiness")
async def readiness(request: Request):
    """Readiness probe: the numerical self-test must pass"""
    checks = numerical_self_test()
    if hasattr(request.app.state, "verifier") and all(checks.values()):
        return {"status": "ready"}
    return JSONResponse(status_code=503, content={"status": "not_ready", "checks": checks})
