"""Exception hierarchy. Every error raised on purpose derives from NoFadeError."""


class NoFadeError(Exception):
    """Base class for all library errors."""


class DegenerateInputError(NoFadeError, ValueError):
    """Input is empty or otherwise too degenerate to compute a statistic."""


class ImageDecodeError(NoFadeError, OSError):
    """An image could not be read. ``path`` names the offending file."""

    def __init__(self, path, reason):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class UnsupportedFormatError(ImageDecodeError):
    pass


class CorruptImageError(ImageDecodeError):
    pass


class SupportError(NoFadeError, ValueError):
    """KL divergence requested where P has mass outside the support of Q."""


class ShapeError(NoFadeError, ValueError):
    pass


class ValidationError(NoFadeError, ValueError):
    pass


class ConfigurationError(NoFadeError, ValueError):
    pass


class HardwareLookupError(NoFadeError, KeyError):
    def __init__(self, name, known):
        self.name = name
        self.known = tuple(sorted(known))
        super().__init__(name)

    def __str__(self):
        return f"unknown GPU type {self.name!r}; known types: {', '.join(self.known)}"


class RegistryError(NoFadeError, ValueError):
    """One or more registry rows failed validation.

    ``errors`` holds ``(row_number, message)`` pairs; row 1 is the header.
    """

    def __init__(self, errors, path=None):
        self.errors = list(errors)
        self.path = None if path is None else str(path)
        lines = [f"row {row}: {msg}" for row, msg in self.errors]
        prefix = f"{self.path}: " if self.path else ""
        super().__init__(prefix + "; ".join(lines))


class StoreError(NoFadeError, OSError):
    pass
