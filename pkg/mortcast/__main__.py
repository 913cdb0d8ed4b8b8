"""`python -m mortcast` entry point."""
from mortcast.main import app

app(prog_name="mortcast")
