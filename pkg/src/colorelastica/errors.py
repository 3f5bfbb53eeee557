"""Exception types shared across the package."""


class ImageIOError(Exception):
    code = "io"


class UnreadableImageError(ImageIOError):
    code = "unreadable"


class UnsupportedFormatError(ImageIOError):
    code = "unsupported-format"


class AlphaChannelError(ImageIOError):
    code = "alpha-channel"


class SolverError(RuntimeError):
    """A sub-solver failed; ``iteration`` is the outer iteration, if known."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration

    def __str__(self):
        msg = super().__str__()
        if self.iteration is not None:
            return f"outer iteration {self.iteration}: {msg}"
        return msg


class NewtonConvergenceError(SolverError):
    def __init__(self, message, pixels=(), iteration=None):
        super().__init__(message, iteration)
        self.pixels = list(pixels)


class SingularSymbolError(SolverError):
    def __init__(self, message, frequency=None, iteration=None):
        super().__init__(message, iteration)
        self.frequency = frequency
