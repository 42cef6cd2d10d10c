"""Local-search laboratory for weighted standard set problems."""

__version__ = "0.1.0"
