"""Harish-Chandra asymptotic solutions and the zonal spherical function of type A_n."""
__version__ = "0.1.0"
