"""Exception hierarchy shared by all graphtherm modules.

Domain errors derive from :class:`GraphThermError` so callers (and the CLI)
can distinguish them from I/O and parse failures, which raise
:class:`InputFormatError`.
"""


class GraphThermError(Exception):
    """Base class for domain errors raised by graphtherm."""


class InvalidGraphError(GraphThermError):
    """A metric graph violates a structural invariant (valence, lengths, connectivity)."""


class InvalidPotentialError(GraphThermError):
    """A potential is incompatible with the shift it is evaluated on."""


class ReducibleShiftError(GraphThermError):
    """The transition matrix is not irreducible; spectral routines refuse it."""


class ResourceLimitError(GraphThermError):
    """A predicted enumeration size exceeds the configured cap."""


class NonTangentError(GraphThermError):
    """A vector fails the first-order entropy constraint; carries the residual."""


class NonHyperbolicError(GraphThermError):
    """A holonomy element has |trace| <= 2 and therefore no translation length."""


class HexagonError(GraphThermError):
    """A hexagon solve or gluing failed to close up within tolerance."""


class InputFormatError(Exception):
    """An input file could not be parsed or fails schema validation."""
