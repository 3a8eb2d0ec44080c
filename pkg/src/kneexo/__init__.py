"""Knee-exoskeleton design analyses: attachment statics, closed-chain
misalignment, transmission and actuator models, and stance-phase assistance."""

__version__ = "0.1.0"
