"""Exception types shared across the package."""


class ParseError(ValueError):
    """A text input (PHN, label file, TextGrid, JSON) could not be parsed.

    Messages name the offending line number where one exists.
    """


class FormatError(ValueError):
    """A binary or structured file violates its on-disk contract."""
