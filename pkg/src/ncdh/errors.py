"""Domain error types.

Every failure mode that is part of an operation's contract raises a subclass
of NcdhError; the CLI maps these to exit code 2 and prints the class name.
"""


class NcdhError(Exception):
    """Base class for all domain errors raised by this package."""


class ModulusMismatch(NcdhError):
    """Two operands live over different moduli (or different extensions)."""


class NotInvertible(NcdhError):
    """An element or matrix has no inverse.

    ``components`` optionally names the vanishing semisimple components;
    ``position`` optionally carries the failing (row, col) of a matrix.
    """

    def __init__(self, message="element is not invertible", *, components=None, position=None):
        super().__init__(message)
        self.components = tuple(components) if components else ()
        self.position = position


class MinorNotInvertible(NotInvertible):
    """The minor deleting row i / column j is not invertible, so the
    quasideterminant at (i, j) does not exist."""

    def __init__(self, i, j):
        super().__init__(f"minor at position ({i}, {j}) is not invertible", position=(i, j))
        self.i = i
        self.j = j


class CharacteristicExcluded(NcdhError):
    """The base field characteristic is 2 or 3, where the group algebra is
    not semisimple and the unit-group order formula does not hold."""


class ThresholdUnreachable(NcdhError):
    """Element sampling could not reach the requested order threshold within
    the retry cap."""


class NoNoncommutingTorus(NcdhError):
    """The base matrix commutes with every torus element, so no valid secret
    conjugator exists."""


class Exhausted(NcdhError):
    """The table attack scanned every candidate without a match; the input is
    not a transcript of the protocol."""


class ResourceCap(NcdhError):
    """An attack input exceeds the configured desk-scale limits."""


class Uninformative(NcdhError):
    """The determinant reduction yields the trivial congruence (det X = 1)."""


class ScalarX(NcdhError):
    """The public base matrix is scalar: conjugation fixes it, so the
    transcript carries no information about the conjugator."""


class RepeatedEigenvalue(NcdhError):
    """The base matrix has a repeated eigenvalue; the eigenvalue reduction
    requires distinct eigenvalues."""


class NoTorusSolution(NcdhError):
    """No exponent candidate admits a torus conjugator solving the
    similarity equation."""
