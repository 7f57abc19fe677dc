"""EMS maglev control toolkit."""

__version__ = "1.0.0"
