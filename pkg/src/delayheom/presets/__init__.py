"""Bundled example configurations (JSON, loadable by name from the CLI)."""
