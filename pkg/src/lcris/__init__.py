"""Loss/range trade-off simulator for liquid-crystal RIS-assisted downlinks."""

__version__ = "0.1.0"
