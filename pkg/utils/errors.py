"""Exception hierarchy shared by the library, the CLI and the HTTP routes."""


class TorusError(Exception):
    """Base class for every error raised on purpose by this package."""


class DimensionMismatchError(TorusError, ValueError):
    pass


class DomainError(TorusError, ValueError):
    """An operation was called outside the set where it is defined."""


class HypothesisError(TorusError, ValueError):
    """A theorem hypothesis or operation precondition does not hold."""

    def __init__(self, hypothesis: str, message: str):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis


class IndependenceSuspectError(TorusError):
    """Sign refinement hit its cap; the declared constants are probably dependent."""


class PropositionViolationError(TorusError):
    """The periodic-basis search exhausted its proven bound.

    This signals an implementation bug: existence is guaranteed.
    """


class SpecParseError(TorusError, ValueError):
    pass
