"""
Tests package for FlatCurve
"""
