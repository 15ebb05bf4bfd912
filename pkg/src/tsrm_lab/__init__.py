"""Self-repelling walk lab: simulation, exact law, and Airy-function analytics.

The package is organised around one simulated object (a nearest-neighbour
walk that prefers the less-visited adjacent edge) and three ways of probing
it: an equivalent maze-exploration process built from coin-filled rectangles,
exact enumeration of the law of the walker position read off the edge
occupation profile, and closed-form constants obtained from the Airy
equation.  Monte Carlo drivers tie the three together.
"""

from tsrm_lab.version import __version__

__all__ = ["__version__"]
