"""
Computation Endpoints
"""
from fastapi import APIRouter, Request

from app.api.dependencies import execute
from app.models import ComputeRequest, RunReport

router = APIRouter()


@router.post("/{quantity}", response_model=RunReport)
def compute(quantity: str, body: ComputeRequest, request: Request):
    """
    Evaluate f0, feps, pairing, phi, g0 or growth

    Complex parameters are strings such as "3+4i"; lists hold several points.
    """
    return execute(request, "compute", quantity, body)
