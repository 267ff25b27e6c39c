"""Triangulation toolkit for polygons, circles, box solids and tower ranges."""

__version__ = "0.1.0"
