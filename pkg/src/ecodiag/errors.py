"""Exception types shared across the package."""
from __future__ import annotations


class EcodiagError(Exception):
    """Base class for all ecodiag errors."""


class FactorParseError(EcodiagError):
    """Malformed factor file; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class FleetParseError(EcodiagError):
    """Malformed fleet CSV / GLPI export; carries the offending row when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


class MissingFactorError(EcodiagError):
    """No emission factor for a category used by the fleet."""

    def __init__(self, category: str):
        self.category = category
        super().__init__(f"missing factor: {category}")


class UnknownFluidError(EcodiagError):
    """Refrigerant fluid absent from the GWP table."""

    def __init__(self, fluid: str):
        self.fluid = fluid
        super().__init__(f"unknown refrigerant fluid: {fluid}")


class ScenarioError(EcodiagError):
    """Invalid scenario action (unknown target, colliding id)."""
