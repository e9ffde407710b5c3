"""Randomized apportionment rules and monotonicity audits."""
__version__ = "0.1.0"
