"""Diversity, distinctness, and faithfulness diagnostics for rationale supervision datasets."""

__version__ = "0.1.0"
