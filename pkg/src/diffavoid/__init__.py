"""Large subsets of [N] whose differences avoid polynomial and form values."""

__version__ = "0.1.0"
