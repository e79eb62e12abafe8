"""Exception hierarchy shared by all percolab modules.

The CLI maps these onto distinct exit codes, so keep the split between
"bad input" and "instance too large" intact.
"""


class PercolabError(Exception):
    """Base class for all errors raised by percolab."""


class PreconditionError(PercolabError, ValueError):
    """An argument violates a documented precondition (bad edge, bad
    probability, infeasible parameter combination, malformed file)."""


class SizeGuardError(PercolabError):
    """An exact-enumeration routine was asked to process an instance above
    its hard size limit.  Never silently truncated."""


class WorkLimitError(PercolabError):
    """A search exceeded its caller-supplied work budget.  The caller must
    shrink the instance or raise the limit."""
