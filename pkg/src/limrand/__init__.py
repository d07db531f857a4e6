"""Network decomposition with limited randomness: simulator, algorithms, verifiers."""

__version__ = "0.1.0"
