"""Exceptional-point pair topology: words, spectra, covers, sphere."""
