"""Numerical verification laboratory for interior, Harnack, and global
estimates for Delta u = g u + f with Zygmund-class data on the flat disk and
model surfaces in semi-geodesic coordinates."""

from . import cli, estimates, pde, rearrange, report, surface
from .report import VerdictReport

__all__ = ["cli", "estimates", "pde", "rearrange", "report", "surface", "VerdictReport"]
__version__ = "0.1.0"
