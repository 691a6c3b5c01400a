"""Online labour observatory: measure demand and supply of online freelance work.

Simulated-platform ingestion, a chain-linked demand index, supply and
gender breakdowns, and an HTTP API with CSV export.
"""

__version__ = "0.1.0"
