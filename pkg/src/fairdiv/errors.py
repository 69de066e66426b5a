"""Exception types shared across the library."""


class FairdivError(Exception):
    """Base class for all fairdiv errors."""


class ParseError(FairdivError):
    """An instance, allocation, or config file could not be parsed."""


class ValidationError(FairdivError):
    """A model invariant failed.

    Carries the failing axiom name, the offending agent (1-based, when
    applicable), and witness subsets (1-based good indices) so the
    violation can be replayed.
    """

    def __init__(self, axiom, message, agent=None, witness=None):
        super().__init__(message)
        self.axiom = axiom
        self.agent = agent
        self.witness = witness


class InfeasibleError(FairdivError):
    """A brute-force oracle or exhaustive query exceeds its configured cap."""
