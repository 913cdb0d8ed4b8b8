"""mortcast: stochastic mortality forecasting and age-range backtests."""

__version__ = "0.1.0"
