"""Rigid rotors coupled to planar oscillators: exact bracket algebra, trajectories
and superintegrability certificates."""

__version__ = "0.1.0"
