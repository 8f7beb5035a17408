class AhlError(Exception):
    """Base class for every error raised by the toolchain."""


class AhlSyntaxError(AhlError):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class SortError(AhlError):
    def __init__(self, message, name=None, loc=None):
        self.name = name
        self.loc = loc
        where = f"{loc[0]}:{loc[1]}: " if loc else ""
        super().__init__(f"{where}{message}")


class DuplicateDeclaration(SortError):
    pass


class EvaluationError(AhlError):
    """An expression could not be evaluated (e.g. ``el`` out of range)."""

    def __init__(self, kind, message, loc=None):
        self.kind = kind
        self.loc = loc
        super().__init__(message)


class DomainError(AhlError):
    pass


class CapExceeded(DomainError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"domain has {count} states, above the cap of {cap}")


class MissingInvariant(AhlError):
    def __init__(self, loc=None):
        self.loc = loc
        where = f" at {loc[0]}:{loc[1]}" if loc else ""
        super().__init__(f"while loop{where} has no invariant annotation")


class ContainsLoop(AhlError):
    def __init__(self):
        super().__init__("syntactic strongest precondition needs a loop-free program")
