"""
App Package
Data models, command line and HTTP surface
"""
