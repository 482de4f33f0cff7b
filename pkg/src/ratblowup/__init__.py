"""Exact invariants of the rational blow-up pieces B_n and C_n, and numeric
checks of the Lagrangian collar model."""

__version__ = "0.1.0"
