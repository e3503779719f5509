"""Pilot-state error correction: exact circuit simulator plus capacity,
redundancy and link-budget calculators for time-dependent depolarizing
links."""

__version__ = "0.1.0"

from pilotqec._kernels import backend_name  # noqa: F401
