"""Exception hierarchy.  ``exit_code`` is what the CLI returns for each family."""


class VNAError(Exception):
    exit_code = 2


class InvalidValue(VNAError, ValueError):
    pass


class InvalidAlgebra(VNAError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid algebra: {lines}")


class InvalidGraph(VNAError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid graph: " + "; ".join(self.violations))


class MassMismatch(VNAError):
    pass


class EmptySelection(VNAError):
    pass


class ParseError(VNAError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}")


class OutOfScope(VNAError):
    exit_code = 3


class BothTracial(OutOfScope):
    pass


class TrivialLoopGroup(OutOfScope):
    pass


class NotClassifiable(OutOfScope):
    pass


class NoMatchingRule(OutOfScope):
    pass


class NoDiffusePiece(VNAError):
    pass


class OracleMismatch(VNAError):
    exit_code = 4

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class DiagnosticError(VNAError):
    """An internal invariant failed (e.g. a non-positive diffuse mass)."""

    exit_code = 4
