"""
API Routes Package
verify, report, compute, table and health endpoints
"""
