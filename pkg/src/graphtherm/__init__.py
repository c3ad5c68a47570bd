"""Thermodynamic formalism on metric graphs and bordered hyperbolic surfaces.

Subpackages cover: exact geodesic enumeration on metric graphs
(:mod:`graphtherm.graphs`), pressure / entropy / equilibrium states for
locally constant potentials (:mod:`graphtherm.thermo`), the pressure metric
on the moduli space of entropy-1 metrics (:mod:`graphtherm.moduli`),
right-angled hexagon coordinates and holonomy for bordered surfaces
(:mod:`graphtherm.hexagons`), and the degeneration of those surfaces to
metric graphs (:mod:`graphtherm.degeneration`).  ``graphtherm.cli`` ties the
pieces into reproducible command-line experiments.
"""

__version__ = "0.1.0"

from .accel import backend  # noqa: F401
