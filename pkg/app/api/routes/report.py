"""
Diagnostic Report Endpoints
"""
from fastapi import APIRouter, Request

from app.api.dependencies import execute
from app.models import RunReport, VerifyRequest

router = APIRouter()


@router.post("/{name}", response_model=RunReport)
def report(name: str, body: VerifyRequest, request: Request):
    """prop94 or residue-f; entries carry status "report" and no tolerance"""
    return execute(request, "report", name, body)
