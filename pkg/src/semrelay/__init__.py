"""Semantic communication over a one-way relay channel, at desk scale.

Core library: a small autodiff engine (`semrelay.nn`), complex baseband
channel simulation (`semrelay.channel`), the channel autoencoder
(`semrelay.autoencoder`), a toy transformer codec (`semrelay.codec`), relay
forwarding protocols (`semrelay.relay`), evaluation metrics
(`semrelay.metrics`), corpus generation (`semrelay.corpus`) and the
experiment harness (`semrelay.experiments`). A FastAPI service
(`semrelay.service`) wraps the library; the CLI (`semrelay.cli`) is a thin
client of that service.
"""

__version__ = "0.1.0"
