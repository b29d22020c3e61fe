"""Exception hierarchy shared by every qbflab module."""


class QBFError(Exception):
    """Base class for all library errors."""


class FormatError(QBFError):
    """Malformed QDIMACS, proof trace or sidecar input."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class OracleScaleError(QBFError):
    """An exhaustive oracle was asked to work beyond its configured cap."""


class FormulaTrueError(QBFError):
    """An operation that needs a false QBF was handed a true one."""


class ProofError(QBFError):
    """A proof step failed to check.

    ``step`` is the id of the offending step (``None`` for whole-proof
    problems such as a missing conclusion).
    """

    def __init__(self, reason, step=None):
        self.reason = reason
        self.step = step
        where = f"step {step}: " if step is not None else ""
        super().__init__(where + reason)

    def as_dict(self):
        return {"step": self.step, "reason": self.reason}
