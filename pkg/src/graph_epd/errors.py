"""Exceptions raised by graph_epd and the exit code each one maps to."""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3


class GraphEpdError(Exception):
    exit_code = EXIT_DATA


class UsageError(GraphEpdError, ValueError):
    """Bad parameter value (unknown filter spec, missing model, ...)."""
    exit_code = EXIT_USAGE


class DataFormatError(GraphEpdError, ValueError):
    """Malformed input. Carries the file and 1-based line when known."""
    exit_code = EXIT_DATA

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.line = line

    def __reduce__(self):
        # raised in pool workers
        return (type(self), (self.message, self.path, self.line))

    def __str__(self):
        where = ''
        if self.path is not None:
            where = f"{self.path}:"
            if self.line is not None:
                where += f"{self.line}:"
            where += ' '
        elif self.line is not None:
            where = f"line {self.line}: "
        return f"{where}{self.message}"


class InvariantViolation(GraphEpdError, RuntimeError):
    exit_code = EXIT_INVARIANT
