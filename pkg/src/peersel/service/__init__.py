"""HTTP service wrapping the core package; the CLI shares its handlers."""

from . import handlers, schemas

__all__ = ["handlers", "schemas"]
