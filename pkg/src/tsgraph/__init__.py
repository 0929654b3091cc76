"""Troubleshooting graphs: a wiring language, an execution engine, and
the surrounding tooling for scripted network diagnostics."""

__version__ = "0.1.0"
