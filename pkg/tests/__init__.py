"""Tests for meanequi."""
