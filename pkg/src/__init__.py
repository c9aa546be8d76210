"""
SLUE pose uncertainty - certified ellipsoidal bounds on object pose from conformal keypoint bounds
"""

__version__ = "1.0.0"
__author__ = "SLUE Team"
__description__ = "Minimum-volume pose ellipsoids certified by SOS S-lemma relaxations"
