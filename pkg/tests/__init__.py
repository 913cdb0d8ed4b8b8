"""mortcast test suite."""
