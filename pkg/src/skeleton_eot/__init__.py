"""Radar/camera extended-object tracking with an elastic skeleton and a
variational-Bayes measurement update."""

__version__ = "0.1.0"
