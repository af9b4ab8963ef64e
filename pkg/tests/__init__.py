"""Tests for the subjet-lab package."""
