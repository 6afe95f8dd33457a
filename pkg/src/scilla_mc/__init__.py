"""Toolchain for a small contract language: parsing, static checks,
interpretation of contracts as communicating automata, and bounded
verification of safety and temporal properties over message schedules."""

__version__ = "0.1.0"
