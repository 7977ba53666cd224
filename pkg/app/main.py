"""
FastAPI Application Entry Point
"""
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.api.routes import compute, health, report, table, verify
from core.config import settings
from core.logging_config import get_logger, setup_logging
from services.report_service import ReportService
from services.verification_service import VerificationService

logger = get_logger(__name__)


# Initialize services at startup
@asynccontextmanager
async def lifespan(app: FastAPI):
    """Manage application lifecycle"""
    # Startup
    setup_logging()
    app.state.verifier = VerificationService()
    app.state.reports = ReportService()
    logger.info("service started", extra={"app": settings.APP_NAME, "version": settings.APP_VERSION})

    yield

    # Shutdown
    logger.info("service stopped", extra={"app": settings.APP_NAME})


# Create FastAPI app
app = FastAPI(
    title=settings.APP_NAME,
    version=settings.APP_VERSION,
    description="Numerical verification of lattice-symbol, Eisenstein and Dirichlet-series identities",
    lifespan=lifespan
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(health.router, prefix="/health", tags=["Health"])
app.include_router(verify.router, prefix="/api/v1/verify", tags=["Verify"])
app.include_router(report.router, prefix="/api/v1/report", tags=["Report"])
app.include_router(compute.router, prefix="/api/v1/compute", tags=["Compute"])
app.include_router(table.router, prefix="/api/v1/table", tags=["Table"])


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "app": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "status": "running",
        "docs": "/docs"
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("app.main:app", host=settings.API_HOST, port=settings.API_PORT)
