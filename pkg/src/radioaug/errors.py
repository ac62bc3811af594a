class DataError(Exception):
    """Malformed data file or mismatched metadata between artifacts."""
