"""Exception types shared across the package.

Everything raised on bad *input* derives from InputError so the CLI can map
it to a single exit code; internal invariant violations use plain asserts.
"""


class FlowtropeError(Exception):
    """Base class for all package errors."""


class InputError(FlowtropeError):
    """Base class for errors caused by invalid caller input."""


# -- symbolic ---------------------------------------------------------------

class AlphabetMismatch(InputError):
    pass


class WindowTooSmall(InputError):
    pass


# -- freegroup --------------------------------------------------------------

class BadIndex(InputError):
    pass


class RankMismatch(InputError):
    pass


# -- folding ----------------------------------------------------------------

class NotFolded(InputError):
    pass


# -- trope ------------------------------------------------------------------

class NotPositive(InputError):
    pass


class PpsRejection(InputError):
    """A sequence failed primitive/proper validation.

    Carries which property failed, the level at which it failed, and the
    verdict the corresponding sequence check returned.
    """

    def __init__(self, property_name, level, verdict):
        self.property_name = property_name
        self.level = level
        self.verdict = verdict
        super().__init__(f"not a valid sequence: {property_name} fails "
                         f"at level {level} (verdict {verdict.name})")


# -- abelian ----------------------------------------------------------------

class NotUnimodular(InputError):
    pass


class NegativeEntry(InputError):
    pass


class BadDimension(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class LabelSetMismatch(InputError):
    pass


class NotEventuallyPeriodic(InputError):
    pass


# -- rewrite ----------------------------------------------------------------

class NotPrimitive(InputError):
    pass


class NotEndomorphic(InputError):
    pass


class InvalidJunction(InputError):
    pass


class NotAperiodic(InputError):
    pass


class HorizonTooSmall(InputError):
    """The scanned fixed-point prefix did not close the tile set."""

    def __init__(self, message, unknown_piece=None):
        self.unknown_piece = unknown_piece
        super().__init__(message)


# -- cli / file formats -----------------------------------------------------

class FormatError(InputError):
    pass


class ParseError(FormatError):
    """Syntax error in a text input, addressed by line and column."""

    def __init__(self, line, col, expected):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class ValidationError(FormatError):
    """Well-formed text that denotes an invalid object."""
