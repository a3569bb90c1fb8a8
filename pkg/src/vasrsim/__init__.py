"""Fluid discrete-event simulator for adaptive VBR streaming over multi-path SDN."""

__version__ = "0.1.0"
