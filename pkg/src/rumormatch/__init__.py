"""rumormatch: detect rumor tweets by matching them against verified rumor articles."""

__version__ = "0.1.0"
