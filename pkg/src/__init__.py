"""
FlatCurve
Epidemic curves on scale-free networks + targeted isolation by centrality
"""

__version__ = "1.0.0"
__author__ = "FlatCurve Team"
