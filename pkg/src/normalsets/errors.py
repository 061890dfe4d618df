"""Shared exception types.

Everything here subclasses ValueError so that callers who do not care
about the distinction can catch one thing.
"""


class OutOfRangeError(ValueError):
    """A query exceeds the range covered by a table, sequence, or bitset."""


class NsetFormatError(ValueError):
    """Malformed NSET header or payload."""


class SeedPreconditionError(ValueError):
    """The seeded sign assignment does not satisfy an operation's precondition.

    Typically the fix is to rerun with a different seed; the message says so.
    """
