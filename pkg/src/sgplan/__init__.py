"""Scene-graph grounded long-horizon task planning with goal decomposition."""

__version__ = "0.1.0"
