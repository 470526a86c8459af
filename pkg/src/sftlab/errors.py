"""Exception types shared across the package.

Budget errors carry the budget that was hit so callers (and the CLI) can
report it; the CLI maps every ``BudgetExceeded`` subclass to exit code 3.
"""


class SftlabError(Exception):
    """Base class for all package errors."""


class OverlappingVolumes(SftlabError):
    pass


class InvalidPatch(SftlabError):
    pass


class SpecFormatError(SftlabError):
    pass


class NotCommensurable(SftlabError):
    """Energy values are not integer multiples of a common positive step."""


class EmptySupport(SftlabError):
    """No admissible interior patch is compatible with the boundary."""


class InconsistentPath(SftlabError):
    pass


class UnclassifiableNeighborhood(SftlabError):
    def __init__(self, message, site=None, pattern=None):
        super().__init__(message)
        self.site = site
        self.pattern = pattern


class NotAdmissible(SftlabError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetExceeded(SftlabError):
    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget


class SearchBudgetExceeded(BudgetExceeded):
    pass


class StateBudgetExceeded(BudgetExceeded):
    pass


class AlphabetBudgetExceeded(BudgetExceeded):
    pass


class ToleranceFailure(SftlabError):
    """A numerical verification exceeded its tolerance."""


class LoopNotClosed(SftlabError):
    pass


class InteriorClipped(SftlabError):
    pass
