"""dqdcorr - Thermal entanglement and correlated coherence of coupled double quantum dots."""

from .version import __version__

__all__ = ["__version__"]
