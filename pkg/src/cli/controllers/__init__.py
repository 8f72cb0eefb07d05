"""Experiment controllers package."""
