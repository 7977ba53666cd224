"""
Coefficient Table Endpoints
"""
from fastapi import APIRouter, HTTPException, Query, Request
from fastapi.responses import Response

from app.api.dependencies import error_status
from app.models import OutputFormat
from core.exceptions import VerificationError

router = APIRouter()


@router.get("/coeffs")
def coeff_table(
    request: Request,
    R: int = Query(1, ge=1, description="Level R"),
    Q: int = Query(3, ge=1, description="Level Q"),
    format: OutputFormat = Query(OutputFormat.JSON, description="json or csv"),
):
    """Nonzero entries of c_{R,Q}(m, n) over (Z/2N^2)^2"""
    try:
        table = request.app.state.verifier.table(R, Q)
    except VerificationError as e:
        raise HTTPException(status_code=error_status(e), detail=str(e))
    body = request.app.state.reports.emit_table(table, format)
    media_type = "text/csv" if format == OutputFormat.CSV else "application/json"
    return Response(content=body, media_type=media_type)
