"""Test suite for Tailgate."""
