"""Tests for the AIM CCGF toolkit."""
