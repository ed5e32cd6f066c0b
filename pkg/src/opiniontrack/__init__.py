"""Cross-media opinion tracking: ingestion, entity mentions, sentiment,
daily indicators with Kalman smoothing, and a REST/JSON service."""

__version__ = "0.1.0"
