"""
Command-line entry points (requires the ``cli`` extra).
"""
