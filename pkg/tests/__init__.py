"""Tests for Token Listing Tool."""
