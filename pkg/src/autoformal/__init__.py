"""Workbench for turning mathematical prose into checked PVS theories."""

__version__ = "0.1.0"
