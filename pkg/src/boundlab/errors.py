"""Exception types shared across the solvers."""


class BoundLabError(Exception):
    """Base class for all solver errors."""


class PropagationDiverged(BoundLabError):
    """Propagation exceeded the magnitude cap; carries the index reached."""

    def __init__(self, index: int, cap: float):
        self.index = index
        self.cap = cap
        super().__init__(f"propagation diverged at index {index} (|u| > {cap:g})")


class DegenerateSamples(BoundLabError):
    pass


class DependentSolutions(BoundLabError):
    pass


class BracketError(BoundLabError):
    """Root bracketing failed: no sign change over the interval."""


class EmptyBracket(BoundLabError):
    """No eigenvalue with the requested node count inside the energy bracket."""


class WrongStateIndex(BoundLabError):
    """Converged state has a node count different from the requested one."""


class DomainError(BoundLabError):
    """Input outside the declared domain of a function or field."""


class AnsatzError(BoundLabError):
    """Requested parameters lie outside the validity range of the ansatz."""
