"""HTTP service wrapping the core label store."""

from .app import create_app

__all__ = ["create_app"]
