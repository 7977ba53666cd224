"""
Verification Endpoints
"""
from fastapi import APIRouter, Request

from app.api.dependencies import execute
from app.models import RunReport, VerifyRequest

router = APIRouter()


@router.post("/{check}", response_model=RunReport)
def verify(check: str, body: VerifyRequest, request: Request):
    """
    Run one identity check, e.g. thm72 with params {"R": 5, "Q": 3}

    A failed tolerance is not an HTTP error: the report carries
    status "fail" for the check.
    """
    return execute(request, "verify", check, body)


@router.get("/")
def list_checks(request: Request):
    """Names accepted by this endpoint"""
    return {"checks": sorted(request.app.state.verifier.checks)}
