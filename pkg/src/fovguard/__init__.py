"""FoV-privacy-aware proactive tile-based VR streaming: camouflage, duration optimisation and QoE simulation."""

__version__ = "0.1.0"
