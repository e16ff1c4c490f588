"""Example-driven UI remixing engine.

Retrieval of real-world UI screenshots by text similarity, whole-document
and component-level remix operations driven by a pluggable generator, a
linear version history, and a retrieval evaluation harness.
"""

__version__ = "0.1.0"
