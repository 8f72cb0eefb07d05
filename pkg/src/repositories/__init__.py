"""Repositories package initialization."""
