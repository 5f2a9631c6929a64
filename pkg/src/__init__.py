"""Tailgate - follow-up drive scenario generation and DSS safety assessment."""

__version__ = "0.1.0"
