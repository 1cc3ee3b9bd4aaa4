"""Rate regions and coding experiments for the separated two-way relay channel."""

__version__ = "0.1.0"
