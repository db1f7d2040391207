"""HTTP service: document store, preview tokens, FastAPI app."""

from .app import create_app
from .store import DocumentStore, PreviewToken, paginate

__all__ = ["DocumentStore", "PreviewToken", "create_app", "paginate"]
