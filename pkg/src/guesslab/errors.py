"""Exception types raised across guesslab."""


class GuesslabError(Exception):
    """Base class for all guesslab errors."""


class InputError(GuesslabError, ValueError):
    """Invalid argument: malformed PMF, out-of-range index, bad shape, ..."""


class CapExceededError(GuesslabError):
    """An exact enumeration would exceed the configured size cap."""
