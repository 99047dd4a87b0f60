"""HTTP service wrapping the core package: domains, generation jobs, playtests."""

from .app import create_app

__all__ = ["create_app"]
