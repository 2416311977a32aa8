"""Free rank filtrations, Duflot complexes and local cohomology over F_p."""

__version__ = "0.1.0"
