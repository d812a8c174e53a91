"""Report emission: JSON, TSV and CSV tables and SVG DET plots."""
