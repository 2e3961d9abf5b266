"""Test suite for slanglag."""
