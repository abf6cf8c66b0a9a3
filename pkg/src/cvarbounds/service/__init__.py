"""FastAPI service wrapping the estimation, bound, and experiment operations."""

from .app import create_app

__all__ = ["create_app"]
