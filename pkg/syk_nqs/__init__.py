"""
Neural quantum states for the Sachdev-Ye-Kitaev model.

Builds the complex SYK and Heisenberg Hamiltonians in the half-filling sector, solves them exactly, trains complex
feed-forward networks against the exact ground state, and measures how many parameters a network needs to reach a
fixed relative energy error.
"""

__version__ = "0.1.0"
__license__ = "MIT"
__status__ = "Beta"
