"""Generalized Euler angles (KAK charts) for SU(N), Sp(N) and G2, their Haar
Jacobians, and the reduction of Haar moments to admissible functions."""
from . import admissible, chart, g2, integrate, kak, linalg, spn, sun, transform

__version__ = "0.1.0"

__all__ = ["admissible", "chart", "g2", "integrate", "kak", "linalg", "spn", "sun", "transform"]
