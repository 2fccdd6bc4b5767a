"""Exact multicast capacity cones for three-user broadcast and MAC channels."""

__version__ = "0.1.0"
