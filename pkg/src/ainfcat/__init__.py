"""ainfcat: symbolic gapped filtered A-infinity categories over the Novikov ring."""

__version__ = "0.1.0"
