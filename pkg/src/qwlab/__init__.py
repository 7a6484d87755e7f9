"""
qwlab: the one-defect Hadamard quantum walk on the line.

Exact time evolution, closed-form stationary measures, return amplitudes by
path counting and generating functions, and the time-averaged limit measure
from residues on the unit circle. Every closed form has an independent
numerical oracle; ``qwlab verify`` runs them all.
"""

__version__ = "0.1.0"
