"""Test suite for the transport lab."""
