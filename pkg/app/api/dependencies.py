"""
Shared Route Helpers
"""
import time

from fastapi import HTTPException, Request

from app.models import RunReport, VerifyRequest
from core.exceptions import ConsistencyError, ConvergenceError, PreconditionError
from core.logging_config import get_logger

logger = get_logger(__name__)


def error_status(error: Exception) -> int:
    """HTTP status for a toolkit error"""
    if isinstance(error, PreconditionError):
        return 422
    if isinstance(error, ConvergenceError):
        return 503
    return 500


def execute(request: Request, group: str, name: str, body: VerifyRequest) -> RunReport:
    """
    Run one verify, report or compute operation on the shared service

    Raises:
        HTTPException: 422 on bad input, 503 when a computation did not
            converge, 500 when redundant formulas disagree
    """
    service = request.app.state.verifier
    start_time = time.time()
    try:
        report = getattr(service, group)(name, body.params, body.overrides, body.flattened)
    except (PreconditionError, ConvergenceError, ConsistencyError) as e:
        logger.warning("run rejected", extra={"group": group, "check": name, "error": str(e)})
        raise HTTPException(status_code=error_status(e), detail=f"{group} {name} failed: {str(e)}")
    report.wall_time_s = round(time.time() - start_time, 3)
    return report
