"""
API Package
FastAPI routers over the verification service
"""
