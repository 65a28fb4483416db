"""EDP prediction and configuration scheduling for composite-cores processors."""

__version__ = "0.1.0"
