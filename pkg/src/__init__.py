# GvM Symmetry Testing Package
__version__ = "1.0.0"
