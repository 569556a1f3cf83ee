"""Exception types raised by the solvers and helpers."""


class ZeroColumn(ValueError):
    """A column that must be normalized has (numerically) zero norm."""


class NegativeEntry(ValueError):
    """A matrix that must be nonnegative has a negative entry."""


class NotOnSimplex(ValueError):
    """A column sum deviates from one beyond tolerance."""


class LineSearchFailed(RuntimeError):
    """No Wolfe point was found within the trial budget.

    The best trial seen is attached so the caller can fall back on it.
    """

    def __init__(self, msg, best_alpha=None, best_value=None):
        super().__init__(msg)
        self.best_alpha = best_alpha
        self.best_value = best_value


class RankTooLarge(ValueError):
    pass


class DegeneratePenalty(ValueError):
    pass


class InfeasibleSparsity(ValueError):
    pass


class EmptyTrace(ValueError):
    pass
