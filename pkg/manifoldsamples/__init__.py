"""Sampling workflow for the reference distributions."""
