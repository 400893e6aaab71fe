"""Prompt material shipped with the package (plain text, no code)."""
