"""Dissociativity of finite groupoids."""

__version__ = "0.1.0"
