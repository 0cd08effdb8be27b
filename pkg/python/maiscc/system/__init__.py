"""System model: array geometry, channels and performance metrics."""
