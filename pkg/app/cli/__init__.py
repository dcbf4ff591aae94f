# app/cli/__init__.py
from app.cli.commands import cli

__all__ = ["cli"]
