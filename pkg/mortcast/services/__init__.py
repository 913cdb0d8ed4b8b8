"""Services package for mortcast."""
