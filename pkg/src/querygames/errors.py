"""Exception types shared across the package."""


class GraphError(ValueError):
    """Invalid graph construction or graph-level precondition."""


class DisconnectedGraphError(GraphError):
    """Operation requires a connected graph."""


class QueryError(ValueError):
    """Malformed query or reply."""


class StrategyError(RuntimeError):
    """A strategy emitted an invalid move; message names the offender."""


class UnsearchableSetError(RuntimeError):
    """No progress query exists for the current candidate set."""


class ResourceLimitError(RuntimeError):
    """A configured size, memo or time cap was exceeded."""


class BudgetExceededError(RuntimeError):
    """Certification found a reply path longer than the round budget."""


class InstanceError(ValueError):
    """Malformed set-cover instance."""


class VerificationError(RuntimeError):
    """A verification run produced a failing report."""
