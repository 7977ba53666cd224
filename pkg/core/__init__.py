"""
Core Package
Arithmetic, special functions, quadrature and the identity checks
"""
