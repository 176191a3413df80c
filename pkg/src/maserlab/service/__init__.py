"""HTTP service exposing the modelling operations over JSON."""

from .app import create_app

__all__ = ["create_app"]
