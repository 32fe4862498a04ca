"""Globally optimal joint sensing and communication beamforming for two-AP cell-free MIMO."""

__version__ = "0.1.0"
