from typing import Optional


class LSSGError(Exception):
    pass


class GraphInputError(LSSGError, ValueError):
    """Bad vertex/index, a non-edge query, or a violated precondition."""


class GraphLoadError(GraphInputError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FixtureError(GraphInputError):
    pass


class InvariantViolation(LSSGError, AssertionError):
    """Raised when a reconstructed structure contradicts itself (a bug, never an input condition)."""


class WrapperExhausted(LSSGError):
    def __init__(self, attempts: int, best_seed: Optional[str], best_edges: Optional[int], budget: float):
        self.attempts = attempts
        self.best_seed = best_seed
        self.best_edges = best_edges
        self.budget = budget
        super().__init__(
            f"No seed within budget {budget:.1f} after {attempts} attempts "
            f"(best seed {best_seed} with {best_edges} edges)"
        )
