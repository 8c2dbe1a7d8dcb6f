"""Conflict graphs and edge-reversal link schedules for wireless mesh networks."""

__version__ = "0.1.0"
