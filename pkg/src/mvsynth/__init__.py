"""Multi-view depth-image-based rendering with complementary-view hole reduction."""

__version__ = "0.1.0"
