"""Artifact writers."""

from .writers import ArtifactWriter, write_series_csv

__all__ = ["ArtifactWriter", "write_series_csv"]
