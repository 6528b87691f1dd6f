"""Exception types shared across the toolkit."""

import os


class GapforgeError(Exception):
    """Base class for all toolkit errors."""


class ParseError(GapforgeError, ValueError):
    """Malformed input document or rational literal."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class InvariantError(GapforgeError, ValueError):
    """A structurally well-formed object violates a type invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ResourceLimitError(GapforgeError):
    """An exhaustive search or enumeration would exceed its configured cap."""


class InfeasibleError(GapforgeError):
    """The linear program has no feasible solution."""


class NotRoundingUpError(GapforgeError, ValueError):
    """A candidate uses patterns outside the support of the fractional solution."""


def default_cap(fallback):
    """Resource cap, overridable through the ``GAPFORGE_CAP`` environment variable."""
    raw = os.environ.get("GAPFORGE_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return fallback
