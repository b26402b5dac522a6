"""
Tests for prymcurves.
"""
