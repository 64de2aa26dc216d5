"""Exact representations of Yangians and twisted Yangians over Q and F_p."""

__version__ = "0.1.0"
