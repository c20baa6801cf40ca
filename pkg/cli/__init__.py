"""Command-line front end."""

from .app import ToolkitApp, run

__all__ = ['ToolkitApp', 'run']
