"""
Circle packings of closed surfaces by one circle, in cross-ratio coordinates.
"""
__version__ = "1.0.0"
