"""Utility functions for calculations and helpers."""
