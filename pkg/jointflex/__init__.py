"""Free-motion analysis of planar assemblies of loosely jointed rigid polygons."""

__version__ = "0.1.0"
