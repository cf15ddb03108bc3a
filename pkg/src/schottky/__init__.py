"""Exact certification of free (and discrete) groups of isometries of
CAT(0) spaces through Schottky-type ping-pong criteria, with a brute-force
word oracle as an independent check."""

__version__ = "0.1.0"
