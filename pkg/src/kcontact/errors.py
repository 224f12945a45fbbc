"""Exception hierarchy shared by the toolkit."""


class KContactError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(KContactError, ValueError):
    """Array shapes disagree with the chart dimension."""


class NonFiniteError(KContactError, FloatingPointError):
    """A field evaluation produced NaN or inf."""


class StructureError(KContactError):
    """The k-contact conditions fail at a point where they are required."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class OutsideOpenSetError(KContactError):
    """The Reeb-free formulation was evaluated where the Hamiltonian vanishes."""


class LayoutError(KContactError):
    """A Darboux layout is missing or incompatible with the requested operation."""


class StabilityError(KContactError):
    """A time step violates the solver's enforced stability bound."""


class BlowUpError(KContactError):
    """The numerical state became non-finite during integration."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class BoundaryIndexError(KContactError, IndexError):
    """A central-difference stencil was requested at a grid boundary."""


class OracleError(KContactError):
    """An analytic oracle was asked for data outside its validity range."""
