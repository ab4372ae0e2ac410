"""Exception hierarchy shared by the numerical modules and the CLI."""


class HCError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 2


class InvalidInput(HCError, ValueError):
    pass


class PoleError(HCError):
    """A Gamma argument sits on (or within the genericity margin of) a pole."""

    def __init__(self, message: str, root=None):
        super().__init__(message)
        self.root = root


class ResonanceError(HCError):
    """A sine denominator or a series denominator vanishes."""

    def __init__(self, message: str, where=None):
        super().__init__(message)
        self.where = where


class RegionError(HCError, ValueError):
    pass


class BudgetExhausted(HCError):
    exit_code = 3
