"""
Services Package
Check registry and report serialization
"""
