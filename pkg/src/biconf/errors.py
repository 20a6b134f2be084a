"""Exception hierarchy shared by every layer of the package."""


class BiconfError(Exception):
    """Base class for all recoverable errors raised by biconf."""


# --- input language -------------------------------------------------------

class DslError(BiconfError):
    pass


class DslSyntaxError(DslError):
    def __init__(self, message, line=None, col=None, expected=()):
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        where = f"{line}:{col}: " if line is not None else ""
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{extra}")


class DuplicateDefinition(DslError):
    pass


class UnknownIdentifier(DslError):
    pass


class DimensionMismatch(DslError):
    pass


class MissingDiagonal(DslError):
    pass


# --- validation / numerics ------------------------------------------------

class SingularMetric(BiconfError):
    pass


class NotAProjector(BiconfError):
    pass


class NonIntegerRank(BiconfError):
    pass


class DomainError(BiconfError):
    pass


class DivisionByZeroConstantTerm(DomainError):
    pass


class OutsideDomain(BiconfError):
    pass


class JetOrderExhausted(BiconfError):
    """A derivative was requested beyond the order carried by a jet field."""


class BlockSplitCrossTerms(BiconfError):
    pass


class DegenerateNormals(BiconfError):
    pass


class DimensionTooSmall(BiconfError):
    pass


class ValenceMismatch(BiconfError):
    pass


class RankExcluded(BiconfError):
    pass


class NotBlockSplit(BiconfError):
    pass


class LeafNotRank3(BiconfError):
    pass


class UnknownVector(BiconfError):
    pass


class NotABCVF(BiconfError):
    pass


class EmptyDomain(BiconfError):
    pass


class NonPositiveRescale(BiconfError):
    pass


class UnknownTensor(BiconfError):
    pass
