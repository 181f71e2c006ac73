"""HTTP API for the decision-model catalog and engine."""

from .app import create_app

__all__ = ["create_app"]
