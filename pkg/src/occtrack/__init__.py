"""Occlusion-aware multi-object tracking toolkit: synthetic scenes,
supervision targets, an online tracker and evaluation metrics."""

__version__ = "0.1.0"
