"""Certified invariants, embeddings and classification verdicts for graph and loop shifts."""

__version__ = "0.1.0"
