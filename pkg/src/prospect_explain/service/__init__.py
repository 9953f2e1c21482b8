"""HTTP service layer (FastAPI) over the prospect-explain core."""

from .app import app, create_app

__all__ = ["app", "create_app"]
